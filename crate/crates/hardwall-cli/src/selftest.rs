//! Cross-module identity suite: quick numerical checks spanning every
//! subsystem, printed with measured residuals. `inject_failure` shrinks all
//! tolerances by 1e9 to verify that the harness actually detects failures.

use crate::config::RunConfig;
use crate::Result;
use hardwall::asymptotic::{constants, covariance_coeffs, expectation_coeffs, u_derivative};
use hardwall::exact::{log_mgf_exact, log_mgf_from_modes, mode_probabilities};
use hardwall::model::{balayage_radial, equilibrium, q_factor, ModelParams};
use hardwall::specfn::erfc_integral_constants;
use hardwall::specfn::theta::{
    jacobi_theta_direct, jacobi_theta_modular, jacobi_theta_triple_product, ThetaParams,
};

pub struct CheckResult {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

fn lcg(seed: &mut u64) -> f64 {
    *seed = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    (*seed >> 11) as f64 / (1u64 << 53) as f64
}

/// Run the suite; returns all check results (caller decides exit code).
pub fn run_selftest(cfg: &RunConfig, inject_failure: bool) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let scale = if inject_failure { 1e-9 } else { 1.0 };
    let tol = |t: f64| t * scale;

    // erfc-integral constants and their exact identities
    let c = erfc_integral_constants()?;
    checks.push(CheckResult {
        name: "I matches the published value -0.81367",
        residual: (c.i - (-0.81367)).abs(),
        tolerance: tol(5e-6),
    });
    checks.push(CheckResult {
        name: "identity I3 = I",
        residual: (c.i3 - c.i).abs(),
        tolerance: tol(1e-8),
    });
    checks.push(CheckResult {
        name: "identity I2 - I4 = I",
        residual: (c.i2 - c.i4 - c.i).abs(),
        tolerance: tol(1e-8),
    });

    // theta identities at deterministic pseudo-random points
    let mut seed = 17u64;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = 4.0 * lcg(&mut seed) - 2.0;
        let t = 0.4 + 3.0 * lcg(&mut seed);
        let p = ThetaParams::new(t).unwrap();
        let v = jacobi_theta_direct(z, &p);
        worst = worst
            .max(((jacobi_theta_direct(z + 1.0, &p) - v) / v).abs())
            .max(((jacobi_theta_modular(z, &p) - v) / v).abs())
            .max(((jacobi_theta_triple_product(z, &p) - v) / v).abs());
    }
    checks.push(CheckResult {
        name: "theta periodicity / modular / triple product",
        residual: worst,
        tolerance: tol(1e-10),
    });

    // balayage quadrature vs closed form
    let mut worst = 0.0f64;
    for &b in &[0.5f64, 1.0, 2.0] {
        let edge = b.powf(-1.0 / (2.0 * b));
        let p = ModelParams::new(b, 0.0, 0.6 * edge, 0.8 * edge).unwrap();
        let eq = equilibrium(&p);
        let (s1, s2) = balayage_radial(&p)?;
        worst = worst
            .max((s1 - eq.sigma1).abs())
            .max((s2 - eq.sigma2).abs());
    }
    checks.push(CheckResult {
        name: "balayage quadrature vs closed form",
        residual: worst,
        tolerance: tol(1e-10),
    });

    // omega telescoping on the configured grid
    let total: f64 = 1.0 + cfg.grid.omega().iter().sum::<f64>();
    let scale_omega = cfg
        .grid
        .omega()
        .iter()
        .map(|w| w.abs())
        .sum::<f64>()
        .max(1.0);
    checks.push(CheckResult {
        name: "omega telescoping identity",
        residual: (total - cfg.grid.big_omega()).abs() / scale_omega,
        tolerance: tol(1e-13),
    });

    // two-path exact MGF at a mid-size n
    let n = *cfg.n_list.first().unwrap_or(&200);
    let a = log_mgf_exact(&cfg.model, &cfg.grid, n)?;
    let b = log_mgf_from_modes(&mode_probabilities(&cfg.model, &cfg.grid, n)?, &cfg.grid)?;
    checks.push(CheckResult {
        name: "two-path exact MGF identity",
        residual: (a - b).abs(),
        tolerance: tol(1e-12),
    });

    // derivative consistency at u = 0 on the configured t-grid
    let eq = equilibrium(&cfg.model);
    let g0 = cfg.grid.with_zero_u();
    let w = g0.len();
    let mut worst = 0.0f64;
    for l in 0..w {
        let mut orders = vec![0usize; w];
        orders[l] = 1;
        let f = |u: &[f64]| -> hardwall::Result<f64> {
            Ok(constants(&cfg.model, &g0.with_u(u.to_vec())?, &eq)?.c1)
        };
        let num = u_derivative(&f, w, &orders, 1e-3)?;
        let closed = expectation_coeffs(&cfg.model, &g0, &eq, l)?.b1;
        worst = worst.max((num - closed).abs());
    }
    {
        let mut orders = vec![0usize; w];
        orders[0] = 2;
        let f = |u: &[f64]| -> hardwall::Result<f64> {
            Ok(constants(&cfg.model, &g0.with_u(u.to_vec())?, &eq)?.c1)
        };
        let num = u_derivative(&f, w, &orders, 1e-2)?;
        let closed = covariance_coeffs(&cfg.model, &g0, &eq, 0, 0)?.b11;
        worst = worst.max((num - closed).abs());
    }
    checks.push(CheckResult {
        name: "derivative consistency (expansion vs closed-form coefficients)",
        residual: worst,
        tolerance: tol(1e-6),
    });

    // positivity of the mgf-shift ratio
    let q = q_factor(&cfg.grid, &cfg.model, &eq);
    checks.push(CheckResult {
        name: "Q ratio positive",
        residual: if q > 0.0 { 0.0 } else { 1.0 },
        tolerance: tol(0.5),
    });

    Ok(checks)
}

/// Print the report; Ok(()) only if every check passed.
pub fn report(checks: &[CheckResult]) -> Result<()> {
    let mut failed = 0usize;
    for ch in checks {
        let status = if ch.passed() { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<55} residual {:>9.2e}  (tol {:.1e})",
            ch.name, ch.residual, ch.tolerance
        );
        if !ch.passed() {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(crate::CliError::Selftest(format!(
            "{failed} of {} checks failed",
            checks.len()
        )));
    }
    println!("selftest: all {} checks passed", checks.len());
    Ok(())
}
