//! The ensemble definition and its equilibrium description, plus the scalar
//! building blocks shared by the exact and asymptotic engines.
//!
//! The confining potential is `|z|^(2b)` with a point charge `alpha` at the
//! origin and a hard annular wall `rho1 < |z| < rho2`. The equilibrium
//! measure acquires singular masses `sigma1`, `sigma2` on the wall circles;
//! `sigma_star` is the total mass inside the inner disk. `x` below always
//! ranges over `[b rho1^(2b), b rho2^(2b)]`, the image of the droplet under
//! `r -> b r^(2b)`.

use crate::quad::integrate;
use crate::{Error, Result};

/// Ensemble parameters `(b, alpha, rho1, rho2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub b: f64,
    pub alpha: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl ModelParams {
    pub fn new(b: f64, alpha: f64, rho1: f64, rho2: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidParams(format!("b must be positive, got {b}")));
        }
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParams(format!(
                "alpha must exceed -1, got {alpha}"
            )));
        }
        let outer = b.powf(-1.0 / (2.0 * b));
        if !(0.0 < rho1 && rho1 < rho2 && rho2 < outer) {
            return Err(Error::InvalidParams(format!(
                "need 0 < rho1 < rho2 < b^(-1/2b) = {outer}, got rho1={rho1}, rho2={rho2}"
            )));
        }
        Ok(Self {
            b,
            alpha,
            rho1,
            rho2,
        })
    }

    /// Droplet edge `b^(-1/(2b))` of the unconstrained ensemble.
    pub fn outer_edge(&self) -> f64 {
        self.b.powf(-1.0 / (2.0 * self.b))
    }

    /// `b rho1^(2b)`, the lower end of the x-domain.
    pub fn wall_lower(&self) -> f64 {
        self.b * self.rho1.powf(2.0 * self.b)
    }

    /// `b rho2^(2b)`, the upper end of the x-domain.
    pub fn wall_upper(&self) -> f64 {
        self.b * self.rho2.powf(2.0 * self.b)
    }

    /// `ln(rho2/rho1)`.
    pub fn log_radius_ratio(&self) -> f64 {
        (self.rho2 / self.rho1).ln()
    }
}

/// Masses of the equilibrium measure: `sigma_star` inside the inner disk,
/// `sigma1`, `sigma2` on the wall circles.
#[derive(Debug, Clone, Copy)]
pub struct EquilibriumData {
    pub sigma_star: f64,
    pub sigma1: f64,
    pub sigma2: f64,
}

/// Closed-form equilibrium data:
/// `sigma_star = (rho2^(2b) - rho1^(2b)) / (2 ln(rho2/rho1))`.
pub fn equilibrium(params: &ModelParams) -> EquilibriumData {
    let p1 = params.rho1.powf(2.0 * params.b);
    let p2 = params.rho2.powf(2.0 * params.b);
    let sigma_star = (p2 - p1) / (2.0 * params.log_radius_ratio());
    EquilibriumData {
        sigma_star,
        sigma1: sigma_star - params.b * p1,
        sigma2: params.b * p2 - sigma_star,
    }
}

/// Balayage route to `(sigma1, sigma2)`: sweep the annulus part of the
/// unconstrained equilibrium measure onto the wall circles by solving the
/// 2x2 log-kernel system with numerically integrated moments
/// `C1 = 2 int r f(r) ln(1/r) dr`, `C2 = 2 int r f(r) dr`, `f(r) = b^2 r^(2b-2)`.
pub fn balayage_radial(params: &ModelParams) -> Result<(f64, f64)> {
    let b = params.b;
    let f = move |r: f64| b * b * r.powf(2.0 * b - 2.0);
    let c1 = integrate(
        |r| 2.0 * r * f(r) * (1.0 / r).ln(),
        params.rho1,
        params.rho2,
        1e-12,
    )?
    .value;
    let c2 = integrate(|r| 2.0 * r * f(r), params.rho1, params.rho2, 1e-12)?.value;
    let l = params.log_radius_ratio();
    let sigma1 = (c1 - c2 * (1.0 / params.rho2).ln()) / l;
    let sigma2 = (c2 * (1.0 / params.rho1).ln() - c1) / l;
    Ok((sigma1, sigma2))
}

/// Radii grid and MGF exponents: `2m` radii merging toward the walls, with
/// `t[0..m]` strictly decreasing (inner) and `t[m..2m]` strictly increasing
/// (outer); `u` are the exponents attached to each disk count.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableGrid {
    m: usize,
    t: Vec<f64>,
    u: Vec<f64>,
    omega: Vec<f64>,
    omega_total: f64,
    /// suffix sums `s_i = u_i + ... + u_{2m}`, length 2m+1, last entry 0
    suffix: Vec<f64>,
}

impl ObservableGrid {
    pub fn new(m: usize, t: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidGrid("m must be at least 1".into()));
        }
        if t.len() != 2 * m || u.len() != 2 * m {
            return Err(Error::InvalidGrid(format!(
                "need 2m = {} entries in t and u, got {} and {}",
                2 * m,
                t.len(),
                u.len()
            )));
        }
        if t.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidGrid(
                "t entries must be finite and >= 0".into(),
            ));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("u entries must be finite".into()));
        }
        for i in 1..m {
            if !(t[i - 1] > t[i]) {
                return Err(Error::InvalidGrid(format!(
                    "inner t must be strictly decreasing: t[{}]={} !> t[{}]={}",
                    i - 1,
                    t[i - 1],
                    i,
                    t[i]
                )));
            }
        }
        for i in m + 1..2 * m {
            if !(t[i - 1] < t[i]) {
                return Err(Error::InvalidGrid(format!(
                    "outer t must be strictly increasing: t[{}]={} !< t[{}]={}",
                    i - 1,
                    t[i - 1],
                    i,
                    t[i]
                )));
            }
        }
        // omega_l = e^{u_{l+1}+..+u_{2m}} (e^{u_l} - 1), via suffix sums and
        // expm1 so near-zero u do not cancel
        let n = 2 * m;
        let mut suffix = vec![0.0; n + 1];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] + u[i];
        }
        let omega: Vec<f64> = (0..n)
            .map(|i| suffix[i + 1].exp() * u[i].exp_m1())
            .collect();
        let omega_total = suffix[0].exp();
        Ok(Self {
            m,
            t,
            u,
            omega,
            omega_total,
            suffix,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of radii, `2m`.
    pub fn len(&self) -> usize {
        2 * self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    /// Telescoping weights; `1 + sum(omega) = big_omega` identically.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// `Omega = exp(u_1 + ... + u_{2m})`.
    pub fn big_omega(&self) -> f64 {
        self.omega_total
    }

    /// Grid with the same shape and all-zero exponents.
    pub fn with_zero_u(&self) -> ObservableGrid {
        ObservableGrid::new(self.m, self.t.clone(), vec![0.0; 2 * self.m]).expect("shape is valid")
    }

    /// Grid with modified exponent vector (same t).
    pub fn with_u(&self, u: Vec<f64>) -> Result<ObservableGrid> {
        ObservableGrid::new(self.m, self.t.clone(), u)
    }
}

/// Disk radii at size `n`: `rho1 (1 - t/n)^(1/2b)` inner,
/// `rho2 (1 + t/n)^(1/2b)` outer. Requires `n > max(t)`.
pub fn radii(grid: &ObservableGrid, params: &ModelParams, n: u64) -> Result<Vec<f64>> {
    let nf = n as f64;
    let t_max = grid.t().iter().cloned().fold(0.0, f64::max);
    if nf <= t_max {
        return Err(Error::Domain(format!(
            "radii need n > max(t) = {t_max}, got n = {n}"
        )));
    }
    let e = 1.0 / (2.0 * params.b);
    let m = grid.m();
    Ok((0..2 * m)
        .map(|i| {
            if i < m {
                params.rho1 * (1.0 - grid.t()[i] / nf).powf(e)
            } else {
                params.rho2 * (1.0 + grid.t()[i] / nf).powf(e)
            }
        })
        .collect())
}

/// `(T_j(x), That_j(x))`: exponentially weighted t-moments attached to the
/// inner and outer walls.
pub fn t_funcs(x: f64, j: u32, grid: &ObservableGrid, params: &ModelParams) -> (f64, f64) {
    let w1 = params.wall_lower();
    let w2 = params.wall_upper();
    let b = params.b;
    let m = grid.m();
    let mut inner = 0.0;
    let mut outer = 0.0;
    for i in 0..m {
        let t = grid.t()[i];
        inner += grid.omega()[i] * t.powi(j as i32) * (-(t / b) * (x - w1)).exp();
    }
    for i in m..2 * m {
        let t = grid.t()[i];
        outer += grid.omega()[i] * t.powi(j as i32) * (-(t / b) * (w2 - x)).exp();
    }
    (inner, outer)
}

/// The two denominators `phi1 = 1 + T_0(x) + That_0(w2)` and
/// `phi2 = 1 - That_0(x) + That_0(w2)`.
///
/// Evaluated in the Abel-summed form whose terms are individually positive
/// for admissible grids (the ordering of t makes the exponential weights
/// monotone), so positivity survives floating point even when the value is
/// exponentially small:
///
/// `phi1 = e^(s_1) g_1 + sum_{l=2}^{m} e^(s_l)(g_l - g_{l-1}) + e^(s_{m+1})(1 - g_m)`
/// with `g_l = exp(-t_l (x - w1)/b)` increasing in l, and
/// `phi2 = ghat_{2m} + e^(s_{m+1}) h_{m+1} + sum_{l=m+2}^{2m} e^(s_l)(h_l - h_{l-1})`
/// with `h_l = 1 - exp(-t_l (w2 - x)/b)` increasing in l.
pub fn phi_denominators(x: f64, grid: &ObservableGrid, params: &ModelParams) -> (f64, f64) {
    let b = params.b;
    let m = grid.m();
    let t = grid.t();
    let s = &grid.suffix;

    let delta = x - params.wall_lower();
    let g = |i: usize| (-t[i] * delta / b).exp();
    let mut phi1 = s[0].exp() * g(0);
    for i in 1..m {
        // g_i - g_{i-1} = -g_i expm1(-(t_{i-1} - t_i) delta / b) >= 0
        phi1 += s[i].exp() * (-g(i) * (-(t[i - 1] - t[i]) * delta / b).exp_m1());
    }
    phi1 += s[m].exp() * (-(-t[m - 1] * delta / b).exp_m1());

    let dhat = params.wall_upper() - x;
    let gh = |i: usize| (-t[i] * dhat / b).exp();
    let mut phi2 = gh(2 * m - 1);
    phi2 += s[m].exp() * (-(-t[m] * dhat / b).exp_m1());
    for i in m + 1..2 * m {
        // h_i - h_{i-1} = ghat_{i-1} - ghat_i >= 0
        phi2 += s[i].exp() * (-gh(i - 1) * (-(t[i] - t[i - 1]) * dhat / b).exp_m1());
    }
    (phi1, phi2)
}

/// `(f(x), fhat(x))` per the expansion's integrands. Errors within 1e-12 of
/// either wall, where the simple poles take over (the regularized forms used
/// by the asymptotic constants handle the walls).
pub fn f_funcs(x: f64, grid: &ObservableGrid, params: &ModelParams) -> Result<(f64, f64)> {
    let w1 = params.wall_lower();
    let w2 = params.wall_upper();
    if x - w1 < 1e-12 || w2 - x < 1e-12 {
        return Err(Error::Domain(format!(
            "f_funcs needs x strictly inside ({w1}, {w2}), got {x}"
        )));
    }
    let b = params.b;
    let alpha = params.alpha;
    let (t1, that1) = t_funcs(x, 1, grid, params);
    let (t2, that2) = t_funcs(x, 2, grid, params);
    let (phi1, phi2) = phi_denominators(x, grid, params);
    let f = (-(w1 / (x - w1) + alpha / b) * t1 - x / (2.0 * b) * t2) / phi1;
    let fhat = ((w2 / (w2 - x) - alpha / b) * that1 + x / (2.0 * b) * that2) / phi2;
    Ok((f, fhat))
}

/// The positive ratio `Q = phi1(sigma_star) / phi2(sigma_star)` whose log
/// shifts the theta argument of the oscillatory term.
pub fn q_factor(grid: &ObservableGrid, params: &ModelParams, eq: &EquilibriumData) -> f64 {
    let (phi1, phi2) = phi_denominators(eq.sigma_star, grid, params);
    phi1 / phi2
}
