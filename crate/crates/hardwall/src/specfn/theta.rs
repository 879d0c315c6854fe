//! Jacobi theta function `theta(z; tau) = sum_l exp(pi i l^2 tau + 2 pi i l z)`
//! on the purely imaginary slice `tau = i tau_im`, where the series is real
//! and positive for real `z`:
//!
//! `theta(z) = 1 + 2 sum_{l>=1} q^(l^2) cos(2 pi l z)`, `q = exp(-pi tau_im)`.
//!
//! Termwise-differentiated first and second logarithmic derivatives are
//! provided (exact for the truncation), plus the modular-image evaluation
//! (a Gaussian comb, fast when `tau_im` is small), the triple-product form,
//! and a complex-argument evaluator used for identity checks.

use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Modular parameter `tau = i tau_im` plus series truncation tolerance.
#[derive(Debug, Clone, Copy)]
pub struct ThetaParams {
    pub tau_im: f64,
    pub truncation_tol: f64,
}

impl ThetaParams {
    pub fn new(tau_im: f64) -> Result<Self> {
        Self::with_tol(tau_im, 1e-16)
    }

    pub fn with_tol(tau_im: f64, truncation_tol: f64) -> Result<Self> {
        if !(tau_im > 0.0) || !tau_im.is_finite() {
            return Err(Error::Domain(format!(
                "theta needs Im(tau) > 0, got {tau_im}"
            )));
        }
        if !(truncation_tol > 0.0 && truncation_tol < 1.0) {
            return Err(Error::Domain(format!(
                "theta truncation tolerance must be in (0,1), got {truncation_tol}"
            )));
        }
        Ok(Self {
            tau_im,
            truncation_tol,
        })
    }

    /// Nome `q = exp(-pi tau_im)`.
    #[inline]
    pub fn nome(&self) -> f64 {
        (-PI * self.tau_im).exp()
    }

    /// Series cutoff: first index whose term magnitude drops below tol.
    fn cutoff(&self) -> usize {
        let l = (-(self.truncation_tol / 2.0).ln() / (PI * self.tau_im))
            .sqrt()
            .ceil();
        (l as usize).clamp(1, 10_000)
    }
}

/// Direct series evaluation (best for `tau_im >= 1`; still fine well below).
pub fn jacobi_theta_direct(z: f64, params: &ThetaParams) -> f64 {
    let l_max = params.cutoff();
    let mut sum = 1.0;
    for l in 1..=l_max {
        let lf = l as f64;
        let w = (-PI * params.tau_im * lf * lf).exp();
        sum += 2.0 * w * (2.0 * PI * lf * z).cos();
    }
    sum
}

/// Modular-image evaluation: `theta(z; i t) = t^(-1/2) sum_l exp(-pi (l-z)^2 / t)`.
pub fn jacobi_theta_modular(z: f64, params: &ThetaParams) -> f64 {
    let t = params.tau_im;
    let half_width = (t * (1.0 / params.truncation_tol).ln() / PI).sqrt() + 1.0;
    let lo = (z - half_width).floor() as i64;
    let hi = (z + half_width).ceil() as i64;
    let mut sum = 0.0;
    for l in lo..=hi {
        let d = l as f64 - z;
        sum += (-PI * d * d / t).exp();
    }
    sum / t.sqrt()
}

/// Theta via whichever series converges faster at this `tau_im`.
pub fn jacobi_theta(z: f64, params: &ThetaParams) -> f64 {
    if params.tau_im >= 1.0 {
        jacobi_theta_direct(z, params)
    } else {
        jacobi_theta_modular(z, params)
    }
}

/// Jacobi triple product form,
/// `prod_l (1 - q^(2l)) (1 + 2 q^(2l-1) cos(2 pi z) + q^(4l-2))`.
pub fn jacobi_theta_triple_product(z: f64, params: &ThetaParams) -> f64 {
    let q = params.nome();
    let c = (2.0 * PI * z).cos();
    let mut prod = 1.0;
    for l in 1..=10_000usize {
        let q2l = q.powi(2 * l as i32);
        let qodd = q.powi(2 * l as i32 - 1);
        prod *= (1.0 - q2l) * (1.0 + 2.0 * qodd * c + qodd * qodd);
        if q2l < params.truncation_tol && qodd < params.truncation_tol {
            break;
        }
    }
    prod
}

fn theta_d1_d2(z: f64, params: &ThetaParams) -> (f64, f64, f64) {
    let l_max = params.cutoff();
    let mut t0 = 1.0;
    let mut t1 = 0.0;
    let mut t2 = 0.0;
    for l in 1..=l_max {
        let lf = l as f64;
        let w = (-PI * params.tau_im * lf * lf).exp();
        let (s, c) = (2.0 * PI * lf * z).sin_cos();
        t0 += 2.0 * w * c;
        t1 -= 4.0 * PI * lf * w * s;
        t2 -= 8.0 * PI * PI * lf * lf * w * c;
    }
    (t0, t1, t2)
}

/// First logarithmic derivative `(ln theta)'(z)` by termwise differentiation.
pub fn log_theta_d1(z: f64, params: &ThetaParams) -> f64 {
    let (t0, t1, _) = theta_d1_d2(z, params);
    t1 / t0
}

/// Second logarithmic derivative `(ln theta)''(z)`.
pub fn log_theta_d2(z: f64, params: &ThetaParams) -> f64 {
    let (t0, t1, t2) = theta_d1_d2(z, params);
    let r = t1 / t0;
    t2 / t0 - r * r
}

/// Complex-argument series (identity checks on the imaginary-tau slice).
pub fn jacobi_theta_complex(z: Complex64, params: &ThetaParams) -> Complex64 {
    let t = params.tau_im;
    // term magnitude exp(-pi l^2 t + 2 pi l |Im z|): solve for the decay point
    let y = z.im.abs();
    let l_max = ((y / t
        + (y * y / (t * t) + (2.0f64 / params.truncation_tol).ln() / (PI * t)).sqrt())
    .ceil() as usize)
        .clamp(1, 20_000);
    let mut sum = Complex64::new(1.0, 0.0);
    for l in 1..=l_max {
        let lf = l as f64;
        let w = (-PI * t * lf * lf).exp();
        let phase = Complex64::new(0.0, 2.0 * PI * lf) * z;
        sum += w * (phase.exp() + (-phase).exp());
    }
    sum
}

/// Complex `(ln theta)''(z)` by termwise differentiation.
pub fn log_theta_d2_complex(z: Complex64, params: &ThetaParams) -> Complex64 {
    let t = params.tau_im;
    let y = z.im.abs();
    let l_max = ((y / t
        + (y * y / (t * t) + (2.0f64 / params.truncation_tol).ln() / (PI * t)).sqrt())
    .ceil() as usize)
        .clamp(1, 20_000);
    let mut t0 = Complex64::new(1.0, 0.0);
    let mut t1 = Complex64::new(0.0, 0.0);
    let mut t2 = Complex64::new(0.0, 0.0);
    for l in 1..=l_max {
        let lf = l as f64;
        let w = (-PI * t * lf * lf).exp();
        let phase = Complex64::new(0.0, 2.0 * PI * lf) * z;
        let (ep, em) = (phase.exp(), (-phase).exp());
        let i2pl = Complex64::new(0.0, 2.0 * PI * lf);
        t0 += w * (ep + em);
        t1 += w * i2pl * (ep - em);
        t2 += w * i2pl * i2pl * (ep + em);
    }
    let r = t1 / t0;
    t2 / t0 - r * r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(t: f64) -> ThetaParams {
        ThetaParams::new(t).unwrap()
    }

    // deterministic pseudo-random points
    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (*seed >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ThetaParams::new(0.0).is_err());
        assert!(ThetaParams::new(-1.0).is_err());
        assert!(ThetaParams::with_tol(1.0, 2.0).is_err());
    }

    #[test]
    fn periodicity_and_symmetry() {
        let mut seed = 7u64;
        for _ in 0..100 {
            let z = 6.0 * lcg(&mut seed) - 3.0;
            let t = 0.3 + 4.0 * lcg(&mut seed);
            let p = params(t);
            let v = jacobi_theta(z, &p);
            assert!(v > 0.0);
            assert!(((jacobi_theta(z + 1.0, &p) - v) / v).abs() < 1e-10);
            assert!(((jacobi_theta(-z, &p) - v) / v).abs() < 1e-10);
        }
    }

    #[test]
    fn quasi_periodicity_on_imaginary_slice() {
        // theta(z + tau) = exp(-2 pi i z) exp(-pi i tau) theta(z)
        let mut seed = 11u64;
        for _ in 0..100 {
            let z = 4.0 * lcg(&mut seed) - 2.0;
            let t = 0.4 + 2.0 * lcg(&mut seed);
            let p = params(t);
            let lhs = jacobi_theta_complex(Complex64::new(z, t), &p);
            let factor = (Complex64::new(0.0, -2.0 * PI * z)).exp() * (PI * t).exp();
            let rhs = factor * jacobi_theta(z, &p);
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm(), "z={z} t={t}");
        }
    }

    #[test]
    fn modular_matches_direct() {
        let mut seed = 23u64;
        for _ in 0..50 {
            let z = 4.0 * lcg(&mut seed) - 2.0;
            let t = 0.05 + 5.0 * lcg(&mut seed);
            let p = params(t);
            let a = jacobi_theta_direct(z, &p);
            let b = jacobi_theta_modular(z, &p);
            assert!(((a - b) / a).abs() < 1e-10, "z={z} t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn triple_product_matches_series() {
        let mut seed = 37u64;
        for _ in 0..100 {
            let z = 4.0 * lcg(&mut seed) - 2.0;
            let t = 0.5 + 4.0 * lcg(&mut seed);
            let p = params(t);
            let a = jacobi_theta_direct(z, &p);
            let b = jacobi_theta_triple_product(z, &p);
            assert!(((a - b) / a).abs() < 1e-10);
        }
    }

    #[test]
    fn large_tau_im_tends_to_one() {
        let p = params(50.0);
        assert!((jacobi_theta(0.37, &p) - 1.0).abs() < 1e-60);
    }

    #[test]
    fn log_derivatives_match_finite_differences() {
        let p = params(1.3);
        let h = 1e-5;
        for &z in &[0.17, 0.42, -0.8] {
            let ln = |x: f64| jacobi_theta(x, &p).ln();
            let d1_fd = (ln(z + h) - ln(z - h)) / (2.0 * h);
            let d2_fd = (ln(z + h) - 2.0 * ln(z) + ln(z - h)) / (h * h);
            assert!((log_theta_d1(z, &p) - d1_fd).abs() < 1e-8);
            assert!((log_theta_d2(z, &p) - d2_fd).abs() < 1e-5);
        }
        // odd symmetry points: derivative vanishes
        assert!(log_theta_d1(0.0, &p).abs() < 1e-14);
        assert!(log_theta_d1(0.5, &p).abs() < 1e-12);
    }

    #[test]
    fn real_slice_has_no_imaginary_residue() {
        let p = params(2.0);
        for &z in &[0.1, 0.9, -1.3] {
            let v = jacobi_theta_complex(Complex64::new(z, 0.0), &p);
            assert!(v.im.abs() < 1e-12 * v.re.abs());
            assert!((v.re - jacobi_theta(z, &p)).abs() < 1e-13 * v.re.abs());
        }
    }
}
