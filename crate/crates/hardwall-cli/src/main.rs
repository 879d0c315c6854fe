use clap::{Args, Parser, Subcommand};
use hardwall_cli::config::{config_from_text, parse_n_list, RunConfig};
use hardwall_cli::manifest::replay_config_text;
use hardwall_cli::{commands, selftest, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Disk counting statistics of a 2D hard-wall ensemble: exact finite-n
/// engine vs theta-oscillation asymptotics, plus exact Monte Carlo sampling.
#[derive(Parser)]
#[command(name = "hardwall", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration file (flat key-value text; a run manifest JSON is
    /// also accepted and replayed from its embedded config echo)
    #[arg(long, env = "HARDWALL_CONFIG")]
    config: PathBuf,

    /// Output directory for CSV files and the JSON manifest
    #[arg(long, default_value = ".", env = "HARDWALL_OUT")]
    out: PathBuf,

    /// Override the configured n grid (comma separated, strictly increasing)
    #[arg(long, env = "HARDWALL_N_LIST")]
    n_list: Option<String>,

    /// Override the configured RNG seed
    #[arg(long, env = "HARDWALL_SEED")]
    seed: Option<u64>,

    /// Rayon worker threads (default: all cores)
    #[arg(long, env = "HARDWALL_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact vs asymptotic log moment generating function over the n grid
    Mgf(CommonArgs),
    /// Exact and asymptotic means/covariances with oscillatory columns
    Moments(CommonArgs),
    /// Poisson-binomial law of the inner count vs the discrete Gaussian
    Dist(CommonArgs),
    /// Monte Carlo count matrices and optional point clouds
    Sample {
        #[command(flatten)]
        common: CommonArgs,
        /// Also export full point clouds (x,y columns, one file per n)
        #[arg(long)]
        clouds: bool,
        /// Override the configured number of samples
        #[arg(long, env = "HARDWALL_NUM_SAMPLES")]
        num_samples: Option<usize>,
    },
    /// Cross-module identity suite with measured residuals
    Selftest {
        #[command(flatten)]
        common: CommonArgs,
        /// Shrink tolerances by 1e9 to verify failure detection (test hook)
        #[arg(long)]
        inject_failure: bool,
    },
}

fn load_config(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let text = if args.config.extension().is_some_and(|e| e == "json") {
        replay_config_text(&args.config)?
    } else {
        std::fs::read_to_string(&args.config)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?
    };
    let mut cfg = config_from_text(&text)?;
    if let Some(nl) = &args.n_list {
        cfg.n_list = parse_n_list(nl).map_err(CliError::Config)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn prepare(args: &CommonArgs) -> Result<RunConfig, CliError> {
    if let Some(t) = args.threads {
        // a global pool can only be installed once; later calls are no-ops
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    std::fs::create_dir_all(&args.out)?;
    load_config(args)
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Mgf(common) => {
            let cfg = prepare(common)?;
            let m = commands::cmd_mgf(&cfg, &common.out)?;
            eprintln!(
                "mgf: wrote {} outputs to {}",
                m.outputs.len(),
                common.out.display()
            );
        }
        Command::Moments(common) => {
            let cfg = prepare(common)?;
            let m = commands::cmd_moments(&cfg, &common.out)?;
            eprintln!(
                "moments: wrote {} outputs to {}",
                m.outputs.len(),
                common.out.display()
            );
        }
        Command::Dist(common) => {
            let cfg = prepare(common)?;
            let m = commands::cmd_dist(&cfg, &common.out)?;
            eprintln!(
                "dist: wrote {} outputs to {}",
                m.outputs.len(),
                common.out.display()
            );
        }
        Command::Sample {
            common,
            clouds,
            num_samples,
        } => {
            let mut cfg = prepare(common)?;
            if let Some(ns) = num_samples {
                cfg.num_samples = *ns;
            }
            let m = commands::cmd_sample(&cfg, &common.out, *clouds)?;
            eprintln!(
                "sample: wrote {} outputs to {}",
                m.outputs.len(),
                common.out.display()
            );
        }
        Command::Selftest {
            common,
            inject_failure,
        } => {
            let cfg = prepare(common)?;
            let checks = selftest::run_selftest(&cfg, *inject_failure)?;
            selftest::report(&checks)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
