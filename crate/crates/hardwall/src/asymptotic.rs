//! The large-n expansion of the log-MGF,
//! `ln E_n = C1 n + C2 ln n + C3 + F_n + C4/sqrt(n) + o(1)`,
//! together with the closed-form asymptotics it implies for expectations,
//! covariances (three regimes), joint cumulants, and the CLT covariance.
//!
//! The oscillatory term is a ratio of theta values,
//! `F_n = ln theta(A + lnQ/(2L); tau) - ln theta(A; tau)`,
//! `A = sigma_star n + 1/2 - alpha + ln(sigma2/sigma1)/(2L)`,
//! `tau = i pi / L`, `L = ln(rho2/rho1)`; `sigma_star n` is reduced mod 1
//! (theta has period one) before use, which bounds the usable n at ~1e6 in
//! double precision.

use crate::model::{
    phi_denominators, q_factor, t_funcs, EquilibriumData, ModelParams, ObservableGrid,
};
use crate::quad::integrate;
use crate::specfn::integrals::erfc_integral_constants;
use crate::specfn::theta::{jacobi_theta, log_theta_d1, log_theta_d2, ThetaParams};
use crate::specfn::wp::wp_lattice_constant;
use crate::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Theta-oscillation context shared by `F_n`, `f_1`, `f_(1,1)` and the
/// discrete-Gaussian centering.
#[derive(Debug, Clone, Copy)]
pub struct ThetaContext {
    pub sigma_star: f64,
    pub alpha: f64,
    /// `L = ln(rho2/rho1)`
    pub log_ratio: f64,
    /// `ln(sigma2/sigma1)`
    pub ln_sigma_ratio: f64,
    pub theta: ThetaParams,
    /// Weierstrass lattice constant `c` at `tau = i pi/L`
    pub c_const: f64,
}

impl ThetaContext {
    pub fn new(params: &ModelParams, eq: &EquilibriumData) -> Result<Self> {
        let log_ratio = params.log_radius_ratio();
        let theta = ThetaParams::new(std::f64::consts::PI / log_ratio)?;
        Ok(Self {
            sigma_star: eq.sigma_star,
            alpha: params.alpha,
            log_ratio,
            ln_sigma_ratio: (eq.sigma2 / eq.sigma1).ln(),
            c_const: wp_lattice_constant(&theta),
            theta,
        })
    }

    /// `sigma_star n mod 1 + 1/2 - alpha + ln(sigma2/sigma1)/(2L)`.
    pub fn arg_base(&self, n: u64) -> f64 {
        let sn = self.sigma_star * n as f64;
        (sn - sn.floor()) + 0.5 - self.alpha + self.ln_sigma_ratio / (2.0 * self.log_ratio)
    }

    /// Centering `Lambda_n` of the inner count.
    pub fn lambda_n(&self, n: u64) -> f64 {
        self.sigma_star * n as f64 - 0.5 - self.alpha + self.ln_sigma_ratio / (2.0 * self.log_ratio)
    }

    /// `(ln theta)'` at the oscillation argument.
    pub fn osc_d1(&self, n: u64) -> f64 {
        log_theta_d1(self.arg_base(n), &self.theta)
    }

    /// `(ln theta)''` at the oscillation argument; equals
    /// `c - wp(arg - 1/2 + tau/2)` on the shifted slice.
    pub fn osc_d2(&self, n: u64) -> f64 {
        log_theta_d2(self.arg_base(n), &self.theta)
    }
}

/// The five-piece expansion, evaluable at any n.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticExpansion {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub ln_q: f64,
    pub ctx: ThetaContext,
}

impl AsymptoticExpansion {
    /// Oscillatory term `F_n` from the theta ratio.
    pub fn f_n(&self, n: u64) -> f64 {
        let base = self.ctx.arg_base(n);
        let shifted = base + self.ln_q / (2.0 * self.ctx.log_ratio);
        (jacobi_theta(shifted, &self.ctx.theta) / jacobi_theta(base, &self.ctx.theta)).ln()
    }

    /// `C1 n + C2 ln n + C3 + F_n + C4/sqrt(n)`.
    pub fn log_mgf(&self, n: u64) -> f64 {
        self.log_mgf_smooth(n) + self.f_n(n)
    }

    /// The expansion without the oscillatory term (diagnostic).
    pub fn log_mgf_smooth(&self, n: u64) -> f64 {
        let nf = n as f64;
        self.c1 * nf + self.c2 * nf.ln() + self.c3 + self.c4 / nf.sqrt()
    }
}

/// Inner-wall regularized C3 integrand,
/// `f(x) + w1 T1(w1) / (Omega (x - w1))`, written through expm1 differences
/// so the pole subtraction loses nothing near the wall.
fn c3_integrand_inner(x: f64, grid: &ObservableGrid, params: &ModelParams) -> f64 {
    let w1 = params.wall_lower();
    let b = params.b;
    let delta = x - w1;
    let m = grid.m();
    let omega = grid.omega();
    let big = grid.big_omega();
    let (t1_w1, _) = t_funcs(w1, 1, grid, params);
    let (t1_x, _) = t_funcs(x, 1, grid, params);
    let (t2_x, _) = t_funcs(x, 2, grid, params);
    let (phi1, _) = phi_denominators(x, grid, params);
    // dt0 = (T0(x) - T0(w1))/delta, dt1 = (T1(x) - T1(w1))/delta
    let mut dt0 = 0.0;
    let mut dt1 = 0.0;
    for (&t, &om) in grid.t()[..m].iter().zip(&omega[..m]) {
        let e = (-t * delta / b).exp_m1() / delta;
        dt0 += om * e;
        dt1 += om * t * e;
    }
    let pole_part = w1 * (t1_w1 * dt0 - big * dt1) / (big * phi1);
    pole_part - (params.alpha / b * t1_x + x / (2.0 * b) * t2_x) / phi1
}

/// Outer-wall regularized C3 integrand,
/// `fhat(x) - w2 That1(w2) / (w2 - x)`.
fn c3_integrand_outer(x: f64, grid: &ObservableGrid, params: &ModelParams) -> f64 {
    let w2 = params.wall_upper();
    let b = params.b;
    let delta = w2 - x;
    let m = grid.m();
    let omega = grid.omega();
    let (_, that1_w2) = t_funcs(w2, 1, grid, params);
    let (_, that1_x) = t_funcs(x, 1, grid, params);
    let (_, that2_x) = t_funcs(x, 2, grid, params);
    let (_, phi2) = phi_denominators(x, grid, params);
    let mut dt0 = 0.0;
    let mut dt1 = 0.0;
    for (&t, &om) in grid.t()[m..].iter().zip(&omega[m..]) {
        let e = (-t * delta / b).exp_m1() / delta;
        dt0 += om * e;
        dt1 += om * t * e;
    }
    // N = (That1(x) - That1(w2)) + That1(w2)(T hat0(x)-That0(w2)) over delta
    let pole_part = w2 * (dt1 + that1_w2 * dt0) / phi2;
    pole_part - (params.alpha / b * that1_x - x / (2.0 * b) * that2_x) / phi2
}

/// Evaluate the expansion constants C1..C4 and the oscillation context.
pub fn constants(
    params: &ModelParams,
    grid: &ObservableGrid,
    eq: &EquilibriumData,
) -> Result<AsymptoticExpansion> {
    let w1 = params.wall_lower();
    let w2 = params.wall_upper();
    let s_star = eq.sigma_star;
    let b = params.b;
    let u_sum: f64 = grid.u().iter().sum();
    let ctx = ThetaContext::new(params, eq)?;
    let ln_q = q_factor(grid, params, eq).ln();

    // C1: wall mass term plus two log integrals of the denominators
    let int1 = integrate(
        |x| phi_denominators(x, grid, params).0.ln(),
        w1,
        s_star,
        1e-12,
    )?;
    let int2 = integrate(
        |x| phi_denominators(x, grid, params).1.ln(),
        s_star,
        w2,
        1e-12,
    )?;
    let c1 = w1 * u_sum + int1.value + int2.value;

    // C2: log n coefficient from the wall T1 values
    let (t1_w1, _) = t_funcs(w1, 1, grid, params);
    let (_, that1_w2) = t_funcs(w2, 1, grid, params);
    let big = grid.big_omega();
    let c2 = -0.5 * w1 * t1_w1 / big + 0.5 * w2 * that1_w2;

    // C3: regularized integrals with the s^2 substitution toward each wall
    let span_in = (s_star - w1).sqrt();
    let int_in = integrate(
        |s| 2.0 * s * c3_integrand_inner(w1 + s * s, grid, params),
        0.0,
        span_in,
        1e-11,
    )?;
    let span_out = (w2 - s_star).sqrt();
    let int_out = integrate(
        |s| 2.0 * s * c3_integrand_outer(w2 - s * s, grid, params),
        0.0,
        span_out,
        1e-11,
    )?;
    let l = ctx.log_ratio;
    let ln_sr = ctx.ln_sigma_ratio;
    let c3 = -0.5 * u_sum - (params.alpha - (2.0 * ln_sr + ln_q) / (4.0 * l)) * ln_q
        + int_in.value
        + int_out.value
        + w1 * t1_w1 / big * (b * params.rho1.powf(b) / (SQRT_2PI * eq.sigma1)).ln()
        - w2 * that1_w2 * (b * params.rho2.powf(b) / (SQRT_2PI * eq.sigma2)).ln();

    // C4: erfc-integral constant times wall moments
    let cal_i = erfc_integral_constants()?.i;
    let (t2_w1, _) = t_funcs(w1, 2, grid, params);
    let (_, that2_w2) = t_funcs(w2, 2, grid, params);
    let r1b = params.rho1.powf(b);
    let r13b = params.rho1.powf(3.0 * b);
    let r2b = params.rho2.powf(b);
    let r23b = params.rho2.powf(3.0 * b);
    let c4 = std::f64::consts::SQRT_2
        * cal_i
        * b
        * (r13b * t2_w1 / big
            - r1b * t1_w1 / big
            - r13b * (t1_w1 / big).powi(2)
            - r23b * that2_w2
            - r2b * that1_w2
            - r23b * that1_w2 * that1_w2);

    Ok(AsymptoticExpansion {
        c1,
        c2,
        c3,
        c4,
        ln_q,
        ctx,
    })
}

/// Convenience: the asymptotic log-MGF at one n.
pub fn log_mgf_asymptotic(
    params: &ModelParams,
    grid: &ObservableGrid,
    eq: &EquilibriumData,
    n: u64,
) -> Result<f64> {
    Ok(constants(params, grid, eq)?.log_mgf(n))
}

/// Which wall a radius index hugs.
fn is_inner(grid: &ObservableGrid, l: usize) -> bool {
    l < grid.m()
}

/// Closed-form coefficients of `E[N(r_l)] = b1 n + c1 ln n + d1 + f1(n) + e1/sqrt(n)`.
#[derive(Debug, Clone, Copy)]
pub struct ExpectationCoeffs {
    pub b1: f64,
    pub c1: f64,
    pub d1: f64,
    pub e1: f64,
    /// decay factor multiplying the oscillation, `exp(-t sigma/b)`
    pub osc_weight: f64,
}

pub fn expectation_coeffs(
    params: &ModelParams,
    grid: &ObservableGrid,
    eq: &EquilibriumData,
    l: usize,
) -> Result<ExpectationCoeffs> {
    if l >= grid.len() {
        return Err(Error::Domain(format!("radius index {l} out of range")));
    }
    let b = params.b;
    let alpha = params.alpha;
    let t = grid.t()[l];
    let lr = params.log_radius_ratio();
    let ln_sr = (eq.sigma2 / eq.sigma1).ln();
    let cal_i = erfc_integral_constants()?.i;
    let sq2 = std::f64::consts::SQRT_2;

    if is_inner(grid, l) {
        let w1 = params.wall_lower();
        let span = eq.sigma1; // sigma_star - w1
        let decay = (-t * span / b).exp();
        let b1 = if t > 0.0 {
            w1 + b * (-(-t * span / b).exp_m1()) / t
        } else {
            eq.sigma_star
        };
        let c1 = -0.5 * w1 * t;
        let quad = integrate(
            |x| {
                let d = x - w1;
                let e = (-t * d / b).exp();
                w1 * t * (-(-t * d / b).exp_m1()) / d - e * t * (2.0 * alpha + x * t) / (2.0 * b)
            },
            w1,
            eq.sigma_star,
            1e-11,
        )?
        .value;
        let d1 = -0.5 - decay * (alpha - ln_sr / (2.0 * lr))
            + w1 * t * (b * params.rho1.powf(b) / (SQRT_2PI * span)).ln()
            + quad;
        let r2b = params.rho1.powf(2.0 * b);
        let e1 = sq2 * cal_i * b * params.rho1.powf(b) * t * (r2b * t - 1.0);
        Ok(ExpectationCoeffs {
            b1,
            c1,
            d1,
            e1,
            osc_weight: decay,
        })
    } else {
        let w2 = params.wall_upper();
        let span = eq.sigma2; // w2 - sigma_star
        let decay = (-t * span / b).exp();
        let b1 = if t > 0.0 {
            w2 - b * (-(-t * span / b).exp_m1()) / t
        } else {
            eq.sigma_star
        };
        let c1 = 0.5 * w2 * t;
        let quad = integrate(
            |x| {
                let d = w2 - x;
                let e = (-t * d / b).exp();
                w2 * t * (-(-t * d / b).exp_m1()) / d + e * t * (2.0 * alpha - x * t) / (2.0 * b)
            },
            eq.sigma_star,
            w2,
            1e-11,
        )?
        .value;
        let d1 = -0.5
            - decay * (alpha - ln_sr / (2.0 * lr))
            - w2 * t * (b * params.rho2.powf(b) / (SQRT_2PI * span)).ln()
            - quad;
        let r2b = params.rho2.powf(2.0 * b);
        let e1 = -sq2 * cal_i * b * params.rho2.powf(b) * t * (r2b * t + 1.0);
        Ok(ExpectationCoeffs {
            b1,
            c1,
            d1,
            e1,
            osc_weight: decay,
        })
    }
}

/// Asymptotic `E[N(r_l)]` at size n (all five pieces).
pub fn expectation_asymptotics(
    params: &ModelParams,
    grid: &ObservableGrid,
    eq: &EquilibriumData,
    l: usize,
    n: u64,
) -> Result<f64> {
    let co = expectation_coeffs(params, grid, eq, l)?;
    let ctx = ThetaContext::new(params, eq)?;
    let f1 = co.osc_weight / (2.0 * ctx.log_ratio) * ctx.osc_d1(n);
    let nf = n as f64;
    Ok(co.b1 * nf + co.c1 * nf.ln() + co.d1 + f1 + co.e1 / nf.sqrt())
}

/// Oscillatory part `f_1(n, t_l)` alone (exported for the moments CSV).
pub fn expectation_oscillation(
    params: &ModelParams,
    grid: &ObservableGrid,
    eq: &EquilibriumData,
    l: usize,
    n: u64,
) -> Result<f64> {
    let co = expectation_coeffs(params, grid, eq, l)?;
    let ctx = ThetaContext::new(params, eq)?;
    Ok(co.osc_weight / (2.0 * ctx.log_ratio) * ctx.osc_d1(n))
}

/// Covariance regime by index pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovRegime {
    InnerInner,
    OuterOuter,
    Cross,
}

/// Closed-form covariance coefficients for one `(l, k)` pair, `l <= k`.
#[derive(Debug, Clone, Copy)]
pub struct CovarianceCoeffs {
    pub regime: CovRegime,
    pub b11: f64,
    pub c11: f64,
    pub d11: f64,
    pub e11: f64,
    /// weight of the wp-term in the oscillation
    pub osc_weight: f64,
    /// weight of the (ln theta)' term in the oscillation
    pub osc_d1_weight: f64,
}

pub fn covariance_coeffs(
    params: &ModelParams,
    grid: &ObservableGrid,
    eq: &EquilibriumData,
    l: usize,
    k: usize,
) -> Result<CovarianceCoeffs> {
    if l > k || k >= grid.len() {
        return Err(Error::Domain(format!(
            "covariance indices need l <= k < 2m, got ({l}, {k})"
        )));
    }
    let b = params.b;
    let alpha = params.alpha;
    let lr = params.log_radius_ratio();
    let ln_sr = (eq.sigma2 / eq.sigma1).ln();
    let cal_i = erfc_integral_constants()?.i;
    let sq2 = std::f64::consts::SQRT_2;
    let m = grid.m();
    let tl = grid.t()[l];
    let tk = grid.t()[k];

    if k < m {
        // both radii at the inner wall; tl >= tk by the grid ordering
        let w1 = params.wall_lower();
        let span = eq.sigma1;
        let b11 = if tk > 0.0 {
            b * (-(-tl * span / b).exp_m1()) / tl
                - b * (-(-(tl + tk) * span / b).exp_m1()) / (tl + tk)
        } else {
            0.0
        };
        let c11 = 0.5 * w1 * tk;
        let quad = integrate(
            |x| {
                let d = x - w1;
                let e_sum = (-(tl + tk) * d / b).exp();
                let e_l = (-tl * d / b).exp();
                -w1 * tk * (-(-(tl + tk) * d / b).exp_m1()) / d
                    + (x * tk * tk + 2.0 * alpha * tk) / (2.0 * b) * e_sum
                    - tl * (-e_l * (-tk * d / b).exp_m1())
                        * (w1 / d + (2.0 * alpha + x * tl) / (2.0 * b))
            },
            w1,
            eq.sigma_star,
            1e-11,
        )?
        .value;
        let d11 = -(-tl * span / b).exp() * (alpha - ln_sr / (2.0 * lr))
            + (-(tl + tk) * span / b).exp() * (alpha - (ln_sr - 1.0) / (2.0 * lr))
            + quad
            - w1 * tk * (b * params.rho1.powf(b) / (SQRT_2PI * span)).ln();
        let r2b = params.rho1.powf(2.0 * b);
        let e11 = sq2 * cal_i * b * params.rho1.powf(b) * tk * (1.0 - r2b * (2.0 * tl + tk));
        let w = (-(tl + tk) * span / b).exp();
        Ok(CovarianceCoeffs {
            regime: CovRegime::InnerInner,
            b11,
            c11,
            d11,
            e11,
            osc_weight: w,
            osc_d1_weight: w * ((tk * span / b).exp() - 1.0),
        })
    } else if l >= m {
        // both at the outer wall; tl <= tk
        let w2 = params.wall_upper();
        let span = eq.sigma2;
        let b11 = if tl > 0.0 {
            b * (-(-tk * span / b).exp_m1()) / tk
                - b * (-(-(tl + tk) * span / b).exp_m1()) / (tl + tk)
        } else {
            0.0
        };
        let c11 = 0.5 * w2 * tl;
        let quad = integrate(
            |x| {
                let d = w2 - x;
                let e_sum = (-(tl + tk) * d / b).exp();
                let e_k = (-tk * d / b).exp();
                -w2 * tl * (-(-(tl + tk) * d / b).exp_m1()) / d
                    + (x * tl * tl - 2.0 * alpha * tl) / (2.0 * b) * e_sum
                    + tk * (-e_k * (-tl * d / b).exp_m1())
                        * (-w2 / d + (2.0 * alpha - x * tk) / (2.0 * b))
            },
            eq.sigma_star,
            w2,
            1e-11,
        )?
        .value;
        let d11 = (-tk * span / b).exp() * (alpha - ln_sr / (2.0 * lr))
            - (-(tl + tk) * span / b).exp() * (alpha - (ln_sr + 1.0) / (2.0 * lr))
            + quad
            - w2 * tl * (b * params.rho2.powf(b) / (SQRT_2PI * span)).ln();
        let r2b = params.rho2.powf(2.0 * b);
        let e11 = -sq2 * cal_i * b * params.rho2.powf(b) * tl * (1.0 + r2b * (tl + 2.0 * tk));
        let w = (-(tl + tk) * span / b).exp();
        Ok(CovarianceCoeffs {
            regime: CovRegime::OuterOuter,
            b11,
            c11,
            d11,
            e11,
            osc_weight: w,
            osc_d1_weight: -w * ((tl * span / b).exp() - 1.0),
        })
    } else {
        // inner-outer: order-one covariance, no n, ln n or 1/sqrt(n) pieces;
        // the oscillation enters as +(c - wp)/(4L^2) times the same weight,
        // i.e. with the same structural sign as the within-block cases
        let w = (-tl * eq.sigma1 / b).exp() * (-tk * eq.sigma2 / b).exp();
        Ok(CovarianceCoeffs {
            regime: CovRegime::Cross,
            b11: 0.0,
            c11: 0.0,
            d11: w / (2.0 * lr),
            e11: 0.0,
            osc_weight: w,
            osc_d1_weight: 0.0,
        })
    }
}

/// Oscillatory part `f_(1,1)(n)` of the covariance: a wp-term (through
/// `(ln theta)''`) plus a `(ln theta)'` correction.
pub fn covariance_oscillation(
    params: &ModelParams,
    grid: &ObservableGrid,
    eq: &EquilibriumData,
    l: usize,
    k: usize,
    n: u64,
) -> Result<f64> {
    let co = covariance_coeffs(params, grid, eq, l, k)?;
    let ctx = ThetaContext::new(params, eq)?;
    let lr = ctx.log_ratio;
    // wp(arg + tau/2) - c = -(ln theta)''(arg + 1/2) evaluated on the real slice
    let wp_minus_c = -ctx.osc_d2(n);
    Ok(-co.osc_weight * wp_minus_c / (4.0 * lr * lr)
        + co.osc_d1_weight / (2.0 * lr) * ctx.osc_d1(n))
}

/// Asymptotic covariance `Cov(N(r_l), N(r_k))` at size n.
pub fn covariance_asymptotics(
    params: &ModelParams,
    grid: &ObservableGrid,
    eq: &EquilibriumData,
    l: usize,
    k: usize,
    n: u64,
) -> Result<f64> {
    let (l, k) = if l <= k { (l, k) } else { (k, l) };
    let co = covariance_coeffs(params, grid, eq, l, k)?;
    let f11 = covariance_oscillation(params, grid, eq, l, k, n)?;
    let nf = n as f64;
    Ok(co.b11 * nf + co.c11 * nf.ln() + co.d11 + f11 + co.e11 / nf.sqrt())
}

/// Limiting correlation matrix of the standardized counts. Requires strictly
/// positive merging rates at both walls (`t_m > 0` and `t_{m+1} > 0`), which
/// makes every diagonal growth coefficient positive.
pub fn clt_covariance(
    params: &ModelParams,
    grid: &ObservableGrid,
    eq: &EquilibriumData,
) -> Result<Vec<Vec<f64>>> {
    let m = grid.m();
    if !(grid.t()[m - 1] > 0.0 && grid.t()[m] > 0.0) {
        return Err(Error::Domain(
            "CLT covariance needs t_m > 0 and t_{m+1} > 0".into(),
        ));
    }
    let w = grid.len();
    let mut diag = vec![0.0; w];
    for (l, d) in diag.iter_mut().enumerate() {
        *d = covariance_coeffs(params, grid, eq, l, l)?.b11;
    }
    let mut sigma = vec![vec![0.0; w]; w];
    for l in 0..w {
        for k in l..w {
            let val = if (l < m) != (k < m) {
                0.0
            } else {
                covariance_coeffs(params, grid, eq, l, k)?.b11 / (diag[l] * diag[k]).sqrt()
            };
            sigma[l][k] = val;
            sigma[k][l] = val;
        }
    }
    Ok(sigma)
}

/// Nested central-difference derivative with Richardson extrapolation in h^2.
/// `orders[i]` is the differentiation order in the i-th u-component.
pub fn u_derivative<F>(f: &F, dims: usize, orders: &[usize], h0: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    assert_eq!(orders.len(), dims);
    fn stencil(order: usize) -> Vec<(f64, f64)> {
        // (offset multiple of h, coefficient of h^-order)
        match order {
            0 => vec![(0.0, 1.0)],
            1 => vec![(-1.0, -0.5), (1.0, 0.5)],
            2 => vec![(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
            3 => vec![(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)],
            4 => vec![
                (-2.0, 1.0),
                (-1.0, -4.0),
                (0.0, 6.0),
                (1.0, -4.0),
                (2.0, 1.0),
            ],
            _ => panic!("derivative order > 4 unsupported"),
        }
    }
    let total: usize = orders.iter().sum();
    if total == 0 {
        return f(&vec![0.0; dims]);
    }
    if orders.iter().any(|&o| o > 4) || total > 4 {
        return Err(Error::Domain(
            "cumulant derivative orders above 4 are unsupported".into(),
        ));
    }
    let eval_at_h = |h: f64| -> Result<f64> {
        // tensor product of the per-component stencils
        let stencils: Vec<Vec<(f64, f64)>> = orders.iter().map(|&o| stencil(o)).collect();
        let mut total_val = 0.0;
        let mut index = vec![0usize; dims];
        loop {
            let mut coeff = 1.0;
            let mut u = vec![0.0; dims];
            for d in 0..dims {
                let (off, c) = stencils[d][index[d]];
                u[d] = off * h;
                coeff *= c / h.powi(orders[d] as i32);
            }
            if coeff != 0.0 {
                total_val += coeff * f(&u)?;
            }
            // odometer increment
            let mut d = 0;
            loop {
                if d == dims {
                    return Ok(total_val);
                }
                index[d] += 1;
                if index[d] < stencils[d].len() {
                    break;
                }
                index[d] = 0;
                d += 1;
            }
        }
    };
    let s1 = eval_at_h(h0)?;
    let s2 = eval_at_h(h0 / 2.0)?;
    let s3 = eval_at_h(h0 / 4.0)?;
    let r1 = s2 + (s2 - s1) / 3.0;
    let r2 = s3 + (s3 - s2) / 3.0;
    Ok(r2 + (r2 - r1) / 15.0)
}

/// Joint cumulant asymptotics for the multi-index `orders` (length 2m).
/// Orders one and two route through the closed-form corollaries; three and
/// four differentiate the assembled expansion numerically.
pub fn cumulant_asymptotics(
    params: &ModelParams,
    grid: &ObservableGrid,
    eq: &EquilibriumData,
    orders: &[usize],
    n: u64,
) -> Result<f64> {
    if orders.len() != grid.len() {
        return Err(Error::Domain(format!(
            "multi-index length {} does not match 2m = {}",
            orders.len(),
            grid.len()
        )));
    }
    let total: usize = orders.iter().sum();
    if total == 0 {
        return Err(Error::Domain("cumulant order must be at least 1".into()));
    }
    if total == 1 {
        let l = orders.iter().position(|&o| o == 1).expect("one index set");
        return expectation_asymptotics(params, grid, eq, l, n);
    }
    if total == 2 {
        let active: Vec<usize> = (0..orders.len())
            .flat_map(|i| std::iter::repeat_n(i, orders[i]))
            .collect();
        return covariance_asymptotics(params, grid, eq, active[0], active[1], n);
    }
    cumulant_numeric(params, grid, eq, orders, n)
}

/// Numeric u-derivative of the assembled expansion (used for orders >= 3 and
/// as the independent cross-check of the closed forms).
pub fn cumulant_numeric(
    params: &ModelParams,
    grid: &ObservableGrid,
    eq: &EquilibriumData,
    orders: &[usize],
    n: u64,
) -> Result<f64> {
    let total: usize = orders.iter().sum();
    let h0 = match total {
        1 => 1e-3,
        2 => 1e-2,
        _ => 5e-2,
    };
    let f = |u: &[f64]| -> Result<f64> {
        let g = grid.with_u(u.to_vec())?;
        Ok(constants(params, &g, eq)?.log_mgf(n))
    };
    u_derivative(&f, grid.len(), orders, h0)
}
