//! Exact Monte Carlo sampling of the hard-wall ensemble.
//!
//! Rotation invariance factorizes the ensemble into independent moduli with
//! known radial laws (Gamma in `v = n R^(2b)`, truncated to the two allowed
//! bands) and iid uniform angles. Moduli are drawn by inverse CDF with a
//! bracketed Newton solve. Counts use the equivalent uniform coupling
//! `U_j = F_j(R_j)`: `R_j < r_l` iff `U_j < p[j][l]`, so one uniform per mode
//! reproduces the exact joint law of all 2m nested counts without any root
//! finding.
//!
//! Determinism: one ChaCha8 stream per sample (stream id = sample index),
//! seeded from the user seed, so results are bit-identical for any thread
//! count.

use crate::exact::{mode_probabilities, ModeProbabilities};
use crate::model::{ModelParams, ObservableGrid};
use crate::specfn::gamma::{ln_gamma, reg_inc_gamma_pair};
use crate::{Error, Result};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

#[inline]
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    // 53-bit uniform in [0, 1)
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Gamma(a) density at v, `v^(a-1) e^-v / Gamma(a)`.
fn gamma_pdf(a: f64, v: f64) -> f64 {
    ((a - 1.0) * v.ln() - v - ln_gamma(a)).exp()
}

/// Which side of the distribution the target refers to.
#[derive(Clone, Copy)]
enum Tail {
    /// solve `P(a, v) = target`
    Lower,
    /// solve `Q(a, v) = target` (kept in survival space so targets near
    /// zero do not collapse to `P = 1`)
    Upper,
}

/// Solve for the quantile on the bracket `[lo, hi]` by Newton steps clipped
/// to a shrinking bisection bracket.
fn invert_gamma_cdf(a: f64, target: f64, mut lo: f64, mut hi: f64, tail: Tail) -> Result<f64> {
    let mut v = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (p, q) = reg_inc_gamma_pair(a, v)?;
        // g increases in v in both parameterizations
        let g = match tail {
            Tail::Lower => p - target,
            Tail::Upper => target - q,
        };
        if g > 0.0 {
            hi = v;
        } else {
            lo = v;
        }
        let d = gamma_pdf(a, v);
        let step = if d > 0.0 { g / d } else { f64::INFINITY };
        let mut next = v - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - v).abs() <= 1e-13 * (1.0 + v.abs()) {
            return Ok(next);
        }
        v = next;
    }
    // bracket collapse is also success
    if (hi - lo) <= 1e-11 * (1.0 + hi.abs()) {
        return Ok(0.5 * (lo + hi));
    }
    Err(Error::RootFinding(format!(
        "gamma cdf inversion stalled at a = {a}, target = {target}"
    )))
}

/// Draw one modulus for mode j: branch on the inner-band probability, then
/// invert the truncated Gamma law. Returns `R = (v/n)^(1/(2b))`.
fn draw_modulus(params: &ModelParams, n: u64, a: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
    let nf = n as f64;
    let z1 = params.rho1.powf(2.0 * params.b) * nf;
    let z2 = params.rho2.powf(2.0 * params.b) * nf;
    let (p1, _) = reg_inc_gamma_pair(a, z1)?;
    let (_, q2) = reg_inc_gamma_pair(a, z2)?;
    let denom = p1 + q2;
    if denom <= 0.0 {
        return Err(Error::Precision(format!("mode weight vanished at a = {a}")));
    }
    let u = uniform(rng).clamp(1e-16, 1.0 - 1e-16);
    let v = if u * denom < p1 {
        // inner band: P(a, v) = u * denom on (0, z1]
        invert_gamma_cdf(a, u * denom, 0.0, z1, Tail::Lower)?
    } else {
        // outer band: Q(a, v) = denom (1 - u)
        let q_target = denom * (1.0 - u);
        let mut hi = (z2.max(a + 10.0 * a.sqrt())) * 1.5 + 10.0;
        let mut grow = 0;
        while reg_inc_gamma_pair(a, hi)?.1 > q_target {
            hi *= 1.5;
            grow += 1;
            if grow > 200 {
                return Err(Error::RootFinding("outer bracket expansion failed".into()));
            }
        }
        invert_gamma_cdf(a, q_target, z2, hi, Tail::Upper)?
    };
    Ok((v / nf).powf(1.0 / (2.0 * params.b)))
}

/// One exact draw of all n moduli. Deterministic given the seed.
pub fn sample_moduli(params: &ModelParams, n: u64, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=n)
        .map(|j| {
            let a = (j as f64 + params.alpha) / params.b;
            draw_modulus(params, n, a, &mut rng)
        })
        .collect()
}

/// Count matrix over many independent samples.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub n: u64,
    pub num_samples: usize,
    pub seed: u64,
    /// `counts[s][l]` = number of moduli below the l-th radius in sample s
    pub counts: Vec<Vec<u32>>,
}

/// Sample the joint counts `(N(r_1), ..., N(r_2m))` `num_samples` times via
/// the uniform coupling against the exact per-mode probabilities.
pub fn sample_counts(
    params: &ModelParams,
    grid: &ObservableGrid,
    n: u64,
    num_samples: usize,
    seed: u64,
) -> Result<SampleBatch> {
    let mp: ModeProbabilities = mode_probabilities(params, grid, n)?;
    let w = grid.len();
    let counts: Vec<Vec<u32>> = (0..num_samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64 + 1);
            let mut row = vec![0u32; w];
            for j in 1..=n {
                let u = uniform(&mut rng);
                let probs = mp.row(j);
                // probs are nondecreasing; count the thresholds above u
                for l in (0..w).rev() {
                    if u < probs[l] {
                        row[l] += 1;
                    } else {
                        break;
                    }
                }
            }
            row
        })
        .collect();
    Ok(SampleBatch {
        n,
        num_samples,
        seed,
        counts,
    })
}

/// Full 2D point sample: moduli by inverse CDF plus iid uniform angles.
pub fn export_point_cloud(params: &ModelParams, n: u64, seed: u64) -> Result<Vec<(f64, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=n)
        .map(|j| {
            let a = (j as f64 + params.alpha) / params.b;
            let r = draw_modulus(params, n, a, &mut rng)?;
            let angle = (uniform(&mut rng) - 0.5) * 2.0 * std::f64::consts::PI;
            Ok((r * angle.cos(), r * angle.sin()))
        })
        .collect()
}
