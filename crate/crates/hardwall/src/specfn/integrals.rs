//! The five regularized erfc-integral constants entering the 1/sqrt(n)
//! correction. Each integrand combines `rho(y) = exp(-y^2)/(sqrt(pi) erfc(y))`
//! with a polynomial subtracted for y > 0 to make the integral converge:
//!
//! I  = int { y rho - X [y^2 + 1/2] },          I1 = int { rho - X [y + y/(2(1+y^2))] },
//! I2 = int { y^3 rho - X [y^4 + y^2/2 - 1/2] }, I3 = int { rho^2 - X [y^2 + 1] },
//! I4 = int { (y rho)^2 - X [y^4 + y^2 - 3/4] },  X = indicator(y > 0).
//!
//! After the subtraction the positive tails decay only algebraically
//! (the I tail is -1/(2y^2) + O(y^-4)), so a plain cutoff cannot reach 1e-9;
//! instead the tail from Y = 8 on is summed analytically from the asymptotic
//! series of `sqrt(pi) y erfcx(y)`, whose reciprocal-series coefficients d_k
//! follow from a_k = (-1)^k (2k-1)!! by convolution.

use crate::quad::integrate_with_breakpoints;
use crate::specfn::erf::{erfc, erfcx};
use crate::Result;
use std::sync::OnceLock;

const SQRT_PI: f64 = 1.772_453_850_905_516;
/// Matching point between quadrature and the analytic tail.
const Y_TAIL: f64 = 8.0;
/// Series length for the tail coefficients.
const NK: usize = 20;

/// `rho(y) = exp(-y^2) / (sqrt(pi) erfc(y))`, stable on both ends.
fn rho(y: f64) -> f64 {
    if y < 0.0 {
        (-y * y).exp() / (SQRT_PI * erfc(y))
    } else {
        1.0 / (SQRT_PI * erfcx(y))
    }
}

/// Coefficients d_k of 1/A(u) and s_k of 1/A(u)^2 where
/// A(u) = sum_k (-1)^k (2k-1)!! u^k, u = 1/(2 y^2).
fn tail_coeffs() -> ([f64; NK], [f64; NK]) {
    let mut a = [0.0f64; NK];
    a[0] = 1.0;
    for k in 1..NK {
        a[k] = -a[k - 1] * (2 * k - 1) as f64;
    }
    let mut d = [0.0f64; NK];
    d[0] = 1.0;
    for k in 1..NK {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += a[j] * d[k - j];
        }
        d[k] = -acc;
    }
    let mut s = [0.0f64; NK];
    for k in 0..NK {
        let mut acc = 0.0;
        for j in 0..=k {
            acc += d[j] * d[k - j];
        }
        s[k] = acc;
    }
    (d, s)
}

/// `sum_k coeff(k) * int_Y^inf u^k dy = sum_k coeff(k) 2^-k Y^(1-2k)/(2k-1)`,
/// truncated at the first nonimproving term (the series is asymptotic).
fn tail_sum_u(coeff: impl Fn(usize) -> f64, y: f64, k_lo: usize, k_hi: usize) -> f64 {
    let mut total = 0.0;
    let mut last = f64::INFINITY;
    for k in k_lo..k_hi {
        let term =
            coeff(k) * 0.5f64.powi(k as i32) * y.powi(1 - 2 * k as i32) / (2.0 * k as f64 - 1.0);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        total += term;
    }
    total
}

/// Same with an extra 1/y in the integrand: `int_Y^inf u^j / y dy`.
fn tail_sum_u_over_y(coeff: impl Fn(usize) -> f64, y: f64, j_lo: usize, j_hi: usize) -> f64 {
    let mut total = 0.0;
    let mut last = f64::INFINITY;
    for j in j_lo..j_hi {
        let term = coeff(j) * 0.5f64.powi(j as i32) * y.powi(-2 * j as i32) / (2.0 * j as f64);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        total += term;
    }
    total
}

/// The computed constants.
#[derive(Debug, Clone, Copy)]
pub struct ErfcIntegrals {
    pub i: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
}

fn compute() -> Result<ErfcIntegrals> {
    let (d, s) = tail_coeffs();
    let tol = 1e-12;
    let y0 = -12.0; // integrands are O(exp(-y^2)) on the left
    let bp = [0.0, 1.0, 3.0];

    let quad_i = integrate_with_breakpoints(
        |y| {
            let sub = if y > 0.0 { y * y + 0.5 } else { 0.0 };
            y * rho(y) - sub
        },
        y0,
        Y_TAIL,
        &bp,
        tol,
    )?;
    let i = quad_i.value + tail_sum_u(|k| d[k + 1] / 2.0, Y_TAIL, 1, NK - 1);

    let quad_i1 = integrate_with_breakpoints(
        |y| {
            let sub = if y > 0.0 {
                y + y / (2.0 * (1.0 + y * y))
            } else {
                0.0
            };
            rho(y) - sub
        },
        y0,
        Y_TAIL,
        &bp,
        tol,
    )?;
    let i1 = quad_i1.value
        + tail_sum_u_over_y(
            |j| (d[j + 1] - (-2.0f64).powi(j as i32)) / 2.0,
            Y_TAIL,
            2,
            NK - 1,
        );

    let quad_i2 = integrate_with_breakpoints(
        |y| {
            let y2 = y * y;
            let sub = if y > 0.0 {
                y2 * y2 + 0.5 * y2 - 0.5
            } else {
                0.0
            };
            y * y2 * rho(y) - sub
        },
        y0,
        Y_TAIL,
        &bp,
        tol,
    )?;
    let i2 = quad_i2.value + tail_sum_u(|k| d[k + 2] / 4.0, Y_TAIL, 1, NK - 2);

    let quad_i3 = integrate_with_breakpoints(
        |y| {
            let r = rho(y);
            let sub = if y > 0.0 { y * y + 1.0 } else { 0.0 };
            r * r - sub
        },
        y0,
        Y_TAIL,
        &bp,
        tol,
    )?;
    let i3 = quad_i3.value + tail_sum_u(|k| s[k + 1] / 2.0, Y_TAIL, 1, NK - 1);

    let quad_i4 = integrate_with_breakpoints(
        |y| {
            let y2 = y * y;
            let r = y * rho(y);
            let sub = if y > 0.0 { y2 * y2 + y2 - 0.75 } else { 0.0 };
            r * r - sub
        },
        y0,
        Y_TAIL,
        &bp,
        tol,
    )?;
    let i4 = quad_i4.value + tail_sum_u(|k| s[k + 2] / 4.0, Y_TAIL, 1, NK - 2);

    Ok(ErfcIntegrals { i, i1, i2, i3, i4 })
}

/// All five constants; computed once and cached (immutable after init).
pub fn erfc_integral_constants() -> Result<ErfcIntegrals> {
    static CACHE: OnceLock<ErfcIntegrals> = OnceLock::new();
    if let Some(v) = CACHE.get() {
        return Ok(*v);
    }
    let v = compute()?;
    Ok(*CACHE.get_or_init(|| v))
}
