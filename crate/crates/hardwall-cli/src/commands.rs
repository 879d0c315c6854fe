//! The four data-producing subcommands. Each writes CSV files plus a JSON
//! manifest into the output directory and is deterministic given the config.

use crate::config::RunConfig;
use crate::csvout::{render, Cell};
use crate::manifest::RunManifest;
use crate::Result;
use hardwall::asymptotic::{
    constants, covariance_asymptotics, covariance_oscillation, expectation_asymptotics,
    expectation_oscillation,
};
use hardwall::exact::{
    counting_pmf, discrete_gaussian_pmf, exact_moments, log_mgf_exact, mode_probabilities,
};
use hardwall::model::equilibrium;
use hardwall::sampler::{export_point_cloud, sample_counts};
use rayon::prelude::*;
use std::path::Path;
use std::time::Instant;

/// `mgf`: exact vs asymptotic log-MGF over the n-grid.
pub fn cmd_mgf(cfg: &RunConfig, out: &Path) -> Result<RunManifest> {
    let start = Instant::now();
    let eq = equilibrium(&cfg.model);
    let e = constants(&cfg.model, &cfg.grid, &eq)?;
    let rows: Vec<Vec<Cell>> = cfg
        .n_list
        .par_iter()
        .map(|&n| -> Result<Vec<Cell>> {
            let exact = log_mgf_exact(&cfg.model, &cfg.grid, n)?;
            let asym = e.log_mgf(n);
            let err = (exact - asym).abs();
            Ok(vec![
                Cell::UInt(n),
                exact.into(),
                asym.into(),
                err.into(),
                (err * (n as f64).powf(0.6)).into(),
            ])
        })
        .collect::<Result<_>>()?;
    let csv = render(
        &[
            "n",
            "ln_mgf_exact",
            "ln_mgf_asymptotic",
            "abs_err",
            "abs_err_times_n_3_5",
        ],
        &rows,
    );
    let mut manifest = RunManifest::new("mgf", "mgf/v1", cfg);
    manifest.write_output(out, "mgf.csv", &csv)?;
    for (k, v) in [
        ("c1", e.c1),
        ("c2", e.c2),
        ("c3", e.c3),
        ("c4", e.c4),
        ("ln_q", e.ln_q),
        ("sigma_star", e.ctx.sigma_star),
        ("tau_im", e.ctx.theta.tau_im),
    ] {
        manifest.constants.insert(k.to_string(), v);
    }
    manifest.wall_ms = start.elapsed().as_millis();
    manifest.save(out, "mgf_manifest.json")?;
    Ok(manifest)
}

/// `moments`: exact and asymptotic means/covariances with the oscillatory
/// columns listed separately.
pub fn cmd_moments(cfg: &RunConfig, out: &Path) -> Result<RunManifest> {
    let start = Instant::now();
    let eq = equilibrium(&cfg.model);
    let w = cfg.grid.len();
    let mut header: Vec<String> = vec!["n".into()];
    for l in 1..=w {
        header.push(format!("mean_exact_{l}"));
        header.push(format!("mean_asym_{l}"));
        header.push(format!("f1_{l}"));
    }
    for l in 1..=w {
        for k in l..=w {
            header.push(format!("cov_exact_{l}_{k}"));
            header.push(format!("cov_asym_{l}_{k}"));
            header.push(format!("f11_{l}_{k}"));
        }
    }
    let rows: Vec<Vec<Cell>> = cfg
        .n_list
        .par_iter()
        .map(|&n| -> Result<Vec<Cell>> {
            let mp = mode_probabilities(&cfg.model, &cfg.grid, n)?;
            let mo = exact_moments(&mp);
            let mut row: Vec<Cell> = vec![Cell::UInt(n)];
            for l in 0..w {
                row.push(mo.mean[l].into());
                row.push(expectation_asymptotics(&cfg.model, &cfg.grid, &eq, l, n)?.into());
                row.push(expectation_oscillation(&cfg.model, &cfg.grid, &eq, l, n)?.into());
            }
            for l in 0..w {
                for k in l..w {
                    row.push(mo.cov[l][k].into());
                    row.push(covariance_asymptotics(&cfg.model, &cfg.grid, &eq, l, k, n)?.into());
                    row.push(covariance_oscillation(&cfg.model, &cfg.grid, &eq, l, k, n)?.into());
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let csv = render(&header_refs, &rows);
    let mut manifest = RunManifest::new("moments", "moments/v1", cfg);
    manifest.write_output(out, "moments.csv", &csv)?;
    manifest.wall_ms = start.elapsed().as_millis();
    manifest.save(out, "moments_manifest.json")?;
    Ok(manifest)
}

/// `dist`: recentred exact pmf of the wall count `N(rho1)` next to the
/// discrete Gaussian, with their total variation distance. The count is
/// taken at the wall itself (t = 0), which is the radius the discrete
/// Gaussian limit describes, independent of the configured grid rates.
pub fn cmd_dist(cfg: &RunConfig, out: &Path) -> Result<RunManifest> {
    let start = Instant::now();
    let eq = equilibrium(&cfg.model);
    let wall_grid = hardwall::model::ObservableGrid::new(1, vec![0.0, 0.0], vec![0.0, 0.0])
        .expect("zero grid is valid");
    let per_n: Vec<Vec<Vec<Cell>>> = cfg
        .n_list
        .par_iter()
        .map(|&n| -> Result<Vec<Vec<Cell>>> {
            let mp = mode_probabilities(&cfg.model, &wall_grid, n)?;
            let dist = counting_pmf(&mp, 0);
            let dg = discrete_gaussian_pmf(&cfg.model, &eq, n);
            let shift = dg.lambda_n.floor() as i64;
            let exact_at = |x: i64| -> f64 {
                let k = x + shift;
                if k >= 0 && (k as usize) < dist.pmf.len() {
                    dist.pmf[k as usize]
                } else {
                    0.0
                }
            };
            let gauss_at = |x: i64| -> f64 {
                dg.support
                    .iter()
                    .position(|&s| s == x)
                    .map(|i| dg.pmf[i])
                    .unwrap_or(0.0)
            };
            // union window: the discrete-Gaussian support is already chosen
            // with < 1e-12 tail mass; extend until the exact pmf is tiny too
            let mut lo = dg.support[0];
            let mut hi = *dg.support.last().unwrap();
            while exact_at(lo) > 1e-13 && lo + shift > 0 {
                lo -= 1;
            }
            while exact_at(hi) > 1e-13 && hi + shift < dist.pmf.len() as i64 - 1 {
                hi += 1;
            }
            let tv: f64 = 0.5
                * (lo..=hi)
                    .map(|x| (exact_at(x) - gauss_at(x)).abs())
                    .sum::<f64>();
            Ok((lo..=hi)
                .map(|x| {
                    vec![
                        Cell::UInt(n),
                        Cell::Int(x),
                        exact_at(x).into(),
                        gauss_at(x).into(),
                        tv.into(),
                    ]
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<Cell>> = per_n.into_iter().flatten().collect();
    let csv = render(
        &[
            "n",
            "x",
            "pmf_exact_recentred",
            "pmf_discrete_gaussian",
            "tv",
        ],
        &rows,
    );
    let mut manifest = RunManifest::new("dist", "dist/v1", cfg);
    manifest.write_output(out, "dist.csv", &csv)?;
    manifest.wall_ms = start.elapsed().as_millis();
    manifest.save(out, "dist_manifest.json")?;
    Ok(manifest)
}

/// `sample`: count matrices per n, and optionally full point clouds.
pub fn cmd_sample(cfg: &RunConfig, out: &Path, clouds: bool) -> Result<RunManifest> {
    let start = Instant::now();
    let mut manifest = RunManifest::new("sample", "sample/v1", cfg);
    for &n in &cfg.n_list {
        let batch = sample_counts(&cfg.model, &cfg.grid, n, cfg.num_samples, cfg.seed)?;
        let mut header: Vec<String> = vec!["sample".into()];
        for l in 1..=cfg.grid.len() {
            header.push(format!("count_{l}"));
        }
        let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        let rows: Vec<Vec<Cell>> = batch
            .counts
            .iter()
            .enumerate()
            .map(|(s, row)| {
                let mut r: Vec<Cell> = vec![Cell::UInt(s as u64)];
                r.extend(row.iter().map(|&c| Cell::UInt(c as u64)));
                r
            })
            .collect();
        manifest.write_output(
            out,
            &format!("counts_{n}.csv"),
            &render(&header_refs, &rows),
        )?;
        if clouds {
            let cloud = export_point_cloud(&cfg.model, n, cfg.seed)?;
            let rows: Vec<Vec<Cell>> = cloud
                .iter()
                .map(|&(x, y)| vec![Cell::Float(x), Cell::Float(y)])
                .collect();
            manifest.write_output(out, &format!("cloud_{n}.csv"), &render(&["x", "y"], &rows))?;
        }
    }
    manifest.wall_ms = start.elapsed().as_millis();
    manifest.save(out, "sample_manifest.json")?;
    Ok(manifest)
}
