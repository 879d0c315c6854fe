//! Exact finite-n engine.
//!
//! Rotation invariance reduces the ensemble to independent moduli: the j-th
//! squared-scaled modulus `v = n R_j^(2b)` follows a Gamma(a_j) law,
//! `a_j = (j + alpha)/b`, truncated to `[0, n rho1^(2b)] u [n rho2^(2b), inf)`.
//! Everything exact follows from the per-mode inclusion probabilities
//! `p[j][l] = P(R_j < r_l)`, a ratio of regularized incomplete gamma values:
//! the joint MGF (a product over modes), all moments, and the exact
//! Poisson-binomial law of each disk count.

use crate::kahan::NeumaierSum;
use crate::model::{equilibrium, EquilibriumData, ModelParams, ObservableGrid};
use crate::specfn::gamma::{ln_reg_inc_gamma_pair, reg_inc_gamma_pair};
use crate::{Error, Result};
use rayon::prelude::*;

/// `n r_l^(2b)` without the radii round-trip: `rho1^(2b) (n - t)` inner,
/// `rho2^(2b) (n + t)` outer.
fn scaled_walls_and_radii(
    grid: &ObservableGrid,
    params: &ModelParams,
    n: u64,
) -> Result<(f64, f64, Vec<f64>)> {
    let nf = n as f64;
    let t_max = grid.t().iter().cloned().fold(0.0, f64::max);
    if nf <= t_max {
        return Err(Error::Domain(format!(
            "need n > max(t) = {t_max}, got n = {n}"
        )));
    }
    let p1 = params.rho1.powf(2.0 * params.b);
    let p2 = params.rho2.powf(2.0 * params.b);
    let m = grid.m();
    let z: Vec<f64> = (0..2 * m)
        .map(|i| {
            if i < m {
                p1 * (nf - grid.t()[i])
            } else {
                p2 * (nf + grid.t()[i])
            }
        })
        .collect();
    Ok((p1 * nf, p2 * nf, z))
}

/// Per-mode inclusion probabilities `p[j][l] = P(R_j < r_l)`, j = 1..n.
#[derive(Debug, Clone)]
pub struct ModeProbabilities {
    n: u64,
    m: usize,
    /// row-major `n x 2m`
    p: Vec<f64>,
}

impl ModeProbabilities {
    /// Probability for mode `j` (1-based, as in the product formula) and
    /// radius index `l` (0-based).
    #[inline]
    pub fn prob(&self, j: u64, l: usize) -> f64 {
        debug_assert!(j >= 1 && j <= self.n);
        self.p[(j as usize - 1) * 2 * self.m + l]
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn num_radii(&self) -> usize {
        2 * self.m
    }

    pub fn row(&self, j: u64) -> &[f64] {
        let w = 2 * self.m;
        &self.p[(j as usize - 1) * w..(j as usize) * w]
    }

    /// All probabilities for one radius index.
    pub fn column(&self, l: usize) -> Vec<f64> {
        (1..=self.n).map(|j| self.prob(j, l)).collect()
    }
}

/// `ln(exp(a) + exp(b))` tolerant of -inf.
fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// One mode's probability row; shared by the matrix builder and the fused
/// MGF loop.
///
/// Probability-space arithmetic by default. Deep in the forbidden gap both
/// band masses underflow while their ratio (and hence every inclusion
/// probability) stays order one -- those rows switch to log space.
fn mode_row(a: f64, z1: f64, z2: f64, z: &[f64], m: usize, row: &mut [f64]) -> Result<()> {
    let (p_in, _) = reg_inc_gamma_pair(a, z1)?;
    let (p_out, q_out) = reg_inc_gamma_pair(a, z2)?;
    let denom = p_in + q_out;
    if denom.is_nan() {
        return Err(Error::Precision(format!("mode denominator NaN at a = {a}")));
    }
    if denom < 1e-280 {
        let (ln_p1, _) = ln_reg_inc_gamma_pair(a, z1)?;
        let (_, ln_q2) = ln_reg_inc_gamma_pair(a, z2)?;
        let ln_d = log_add_exp(ln_p1, ln_q2);
        if ln_d == f64::NEG_INFINITY {
            return Err(Error::Precision(format!(
                "mode denominator vanished at a = {a}"
            )));
        }
        for (l, &zl) in z.iter().enumerate() {
            let ln_num = if l < m {
                ln_reg_inc_gamma_pair(a, zl)?.0
            } else {
                // p1 + (Q2 - Ql) with Ql <= Q2
                let (_, ln_ql) = ln_reg_inc_gamma_pair(a, zl)?;
                let ratio = (ln_ql - ln_q2).min(0.0);
                let ln_diff = if ratio == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    ln_q2 + (-ratio.exp_m1()).ln()
                };
                log_add_exp(ln_p1, ln_diff)
            };
            row[l] = (ln_num - ln_d).exp().clamp(0.0, 1.0);
        }
    } else {
        for (l, &zl) in z.iter().enumerate() {
            let num = if l < m {
                reg_inc_gamma_pair(a, zl)?.0
            } else {
                // p_in + [P(a,zl) - P(a,z2)], the bracket through whichever
                // side is far from 1
                let (p_l, q_l) = reg_inc_gamma_pair(a, zl)?;
                let diff = if p_out > 0.5 {
                    q_out - q_l
                } else {
                    p_l - p_out
                };
                p_in + diff
            };
            row[l] = (num / denom).clamp(0.0, 1.0);
        }
    }
    // nesting within each half and across the gap; tiny float violations are
    // flattened, anything real is a precision failure
    for l in 1..2 * m {
        if l == m {
            continue;
        }
        let prev = row[l - 1];
        if row[l] < prev {
            if prev - row[l] > 1e-12 {
                return Err(Error::Precision(format!(
                    "nesting violated at a = {a}: p[{}] = {} > p[{}] = {}",
                    l - 1,
                    prev,
                    l,
                    row[l]
                )));
            }
            row[l] = prev;
        }
    }
    if m >= 1 && row[m] < row[m - 1] {
        if row[m - 1] - row[m] > 1e-12 {
            return Err(Error::Precision(format!(
                "cross-wall nesting violated at a = {a}"
            )));
        }
        row[m] = row[m - 1];
    }
    Ok(())
}

/// Build the full `n x 2m` matrix of inclusion probabilities.
pub fn mode_probabilities(
    params: &ModelParams,
    grid: &ObservableGrid,
    n: u64,
) -> Result<ModeProbabilities> {
    let (z1, z2, z) = scaled_walls_and_radii(grid, params, n)?;
    let m = grid.m();
    let w = 2 * m;
    let mut p = vec![0.0; n as usize * w];
    p.par_chunks_mut(w)
        .enumerate()
        .try_for_each(|(idx, row)| -> Result<()> {
            let a = (idx as f64 + 1.0 + params.alpha) / params.b;
            mode_row(a, z1, z2, &z, m, row)
        })?;
    Ok(ModeProbabilities { n, m, p })
}

/// `ln E_n = sum_j ln(1 + sum_l omega_l p[j][l])`, fused over j with
/// compensated summation in ascending j (deterministic regardless of the
/// parallel row computation).
pub fn log_mgf_exact(params: &ModelParams, grid: &ObservableGrid, n: u64) -> Result<f64> {
    let (z1, z2, z) = scaled_walls_and_radii(grid, params, n)?;
    let m = grid.m();
    let w = 2 * m;
    let terms: Vec<f64> = (0..n as usize)
        .into_par_iter()
        .map(|idx| -> Result<f64> {
            let a = (idx as f64 + 1.0 + params.alpha) / params.b;
            let mut row = vec![0.0; w];
            mode_row(a, z1, z2, &z, m, &mut row)?;
            let mut arg = 1.0;
            for (&om, &pr) in grid.omega().iter().zip(&row) {
                arg += om * pr;
            }
            if arg <= 0.0 {
                return Err(Error::Precision(format!(
                    "log argument {arg} <= 0 at mode {}",
                    idx + 1
                )));
            }
            Ok(arg.ln())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut acc = NeumaierSum::new();
    for t in terms {
        acc.add(t);
    }
    Ok(acc.total())
}

/// Same MGF from an existing probability matrix (the second code path of the
/// two-path identity).
pub fn log_mgf_from_modes(mp: &ModeProbabilities, grid: &ObservableGrid) -> Result<f64> {
    let mut acc = NeumaierSum::new();
    for j in 1..=mp.n() {
        let mut arg = 1.0;
        for (l, &om) in grid.omega().iter().enumerate() {
            arg += om * mp.prob(j, l);
        }
        if arg <= 0.0 {
            return Err(Error::Precision(format!(
                "log argument {arg} <= 0 at mode {j}"
            )));
        }
        acc.add(arg.ln());
    }
    Ok(acc.total())
}

/// Exact first and second moments of `(N(r_1), ..., N(r_2m))`.
#[derive(Debug, Clone)]
pub struct Moments {
    pub mean: Vec<f64>,
    /// covariance matrix, `cov[l][k]`
    pub cov: Vec<Vec<f64>>,
}

/// Means `sum_j p[j][l]` and covariances `sum_j p_min (1 - p_max)` from the
/// independent-mode structure with nested events.
pub fn exact_moments(mp: &ModeProbabilities) -> Moments {
    let w = mp.num_radii();
    let mut mean_acc: Vec<NeumaierSum> = vec![NeumaierSum::new(); w];
    let mut cov_acc: Vec<NeumaierSum> = vec![NeumaierSum::new(); w * w];
    for j in 1..=mp.n() {
        let row = mp.row(j);
        for l in 0..w {
            mean_acc[l].add(row[l]);
            for k in l..w {
                // radii increase with the index, so min/max is by position
                cov_acc[l * w + k].add(row[l] * (1.0 - row[k]));
            }
        }
    }
    let mean = mean_acc.iter().map(|s| s.total()).collect();
    let mut cov = vec![vec![0.0; w]; w];
    for l in 0..w {
        for k in l..w {
            let v = cov_acc[l * w + k].total();
            cov[l][k] = v;
            cov[k][l] = v;
        }
    }
    Moments { mean, cov }
}

/// Exact law of one disk count.
#[derive(Debug, Clone)]
pub struct CountingDistribution {
    /// pmf[k] = P(N = k), k = 0..n
    pub pmf: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

/// Poisson-binomial pmf of independent Bernoulli(p_j) by the O(n^2)
/// probability-space convolution.
pub fn poisson_binomial_pmf(ps: &[f64]) -> Vec<f64> {
    let mut pmf = vec![0.0; ps.len() + 1];
    pmf[0] = 1.0;
    for (j, &p) in ps.iter().enumerate() {
        // walk k downward so pmf[k-1] is still the previous round's value
        for k in (0..=j + 1).rev() {
            let stay = pmf[k] * (1.0 - p);
            let up = if k > 0 { pmf[k - 1] * p } else { 0.0 };
            pmf[k] = stay + up;
        }
    }
    pmf
}

/// Exact pmf of `N(r_l)` for one radius index.
pub fn counting_pmf(mp: &ModeProbabilities, l: usize) -> CountingDistribution {
    let ps = mp.column(l);
    let pmf = poisson_binomial_pmf(&ps);
    let mut mean = NeumaierSum::new();
    let mut var = NeumaierSum::new();
    for &p in &ps {
        mean.add(p);
        var.add(p * (1.0 - p));
    }
    CountingDistribution {
        pmf,
        mean: mean.total(),
        variance: var.total(),
    }
}

/// The limiting integer-valued law of the recentred inner count: weights
/// `(rho1/rho2)^((x - frac)^2)` on a window of integers.
#[derive(Debug, Clone)]
pub struct DiscreteGaussian {
    /// integer support, symmetric window
    pub support: Vec<i64>,
    pub pmf: Vec<f64>,
    /// centering `Lambda_n = sigma_star n - 1/2 - alpha + ln(sigma2/sigma1)/(2 ln(rho2/rho1))`
    pub lambda_n: f64,
    /// fractional part of `Lambda_n`
    pub frac: f64,
}

impl DiscreteGaussian {
    /// `E[Q^(X - frac)]` for the MGF identity with the theta ratio.
    pub fn mgf_shift(&self, q: f64) -> f64 {
        self.support
            .iter()
            .zip(&self.pmf)
            .map(|(&x, &p)| p * q.powf(x as f64 - self.frac))
            .sum()
    }
}

/// Build the discrete Gaussian at size `n`.
pub fn discrete_gaussian_pmf(
    params: &ModelParams,
    eq: &EquilibriumData,
    n: u64,
) -> DiscreteGaussian {
    let l = params.log_radius_ratio();
    let lambda_n =
        eq.sigma_star * n as f64 - 0.5 - params.alpha + (eq.sigma2 / eq.sigma1).ln() / (2.0 * l);
    let frac = lambda_n - lambda_n.floor();
    // weight (rho1/rho2)^(x^2) = exp(-l x^2) < 1e-12 beyond the window
    let k = ((12.0 * std::f64::consts::LN_10 / l).sqrt()).ceil() as i64 + 2;
    let support: Vec<i64> = (-k..=k).collect();
    let weights: Vec<f64> = support
        .iter()
        .map(|&x| (-l * (x as f64 - frac).powi(2)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    DiscreteGaussian {
        support,
        pmf: weights.iter().map(|w| w / total).collect(),
        lambda_n,
        frac,
    }
}

/// Convenience: equilibrium data straight from the parameters.
pub fn equilibrium_for(params: &ModelParams) -> EquilibriumData {
    equilibrium(params)
}
