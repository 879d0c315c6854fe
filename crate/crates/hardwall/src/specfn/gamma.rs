//! Regularized incomplete gamma functions.
//!
//! Three evaluation routes, selected on `(a, z)`:
//! * power series for `z < a + 1` with `a` below [`A_MIN_TEMME`],
//! * Lentz continued fraction for `z >= a + 1` with `a` below the cutoff,
//! * uniform large-`a` expansion (erfc leading term plus a three-coefficient
//!   correction) for `a >= A_MIN_TEMME`, valid for all `z >= 0`.
//!
//! The uniform expansion is
//! `P(a, lambda a) = erfc(-eta sqrt(a/2))/2 - R_a(eta)`,
//! `R_a(eta) ~ exp(-a eta^2/2)/sqrt(2 pi a) * (c0 + c1/a + c2/a^2)`,
//! where `eta^2/2 = lambda - 1 - ln lambda` with `sign(eta) = sign(lambda-1)`.
//! The coefficients `c_j` are the bounded remainders of `phi_j =
//! (-1)^(j+1) (2j-1)!!/eta^(2j+1)` after removing the full singular part at
//! `lambda = 1`; near that point they are evaluated by Maclaurin series in
//! `s = lambda - 1` (coefficients derived symbolically, anchors c0(0) = -1/3,
//! c1(0) = -1/540, c2(0) = 25/6048).

#![allow(clippy::excessive_precision)] // series coefficients carry their derived digits

use crate::specfn::erf::erfc;
use crate::{Error, Result};

/// Switch to the uniform expansion at this `a`; the c2-truncated error is
/// ~a^-3.5 times a small bounded coefficient, below 1e-11 from 512 up.
pub const A_MIN_TEMME: f64 = 512.0;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
/// ln(2*pi)/2
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `eta(s)` Maclaurin coefficients, `eta = s + sum_{k>=2} E[k-2] s^k`.
const ETA_SERIES: [f64; 7] = [
    -1.0 / 3.0,
    7.0 / 36.0,
    -73.0 / 540.0,
    1331.0 / 12960.0,
    -22409.0 / 272160.0,
    372571.0 / 5443200.0,
    -953677.0 / 16329600.0,
];

/// Maclaurin coefficients of c0(s), c1(s), c2(s) in s = lambda - 1.
const C0_SERIES: [f64; 12] = [
    -0.333_333_333_333_333_3,
    0.083_333_333_333_333_33,
    -0.042_592_592_592_592_59,
    0.027_237_654_320_987_654,
    -0.019_477_513_227_513_227,
    0.014_896_200_764_256_32,
    -0.011_915_478_640_015_677,
    0.009_842_230_520_037_233,
    -0.008_328_093_512_180_232,
    0.007_180_348_385_069_86,
    -0.006_284_419_272_101_214,
    0.005_568_252_617_885_114,
];
const C1_SERIES: [f64; 10] = [
    -0.001_851_851_851_851_851_8,
    -0.003_472_222_222_222_222,
    0.003_802_910_052_910_053,
    -0.003_429_049_088_771_311,
    0.002_988_131_981_187_536_7,
    -0.002_597_258_199_833_431_3,
    0.002_270_865_542_818_775,
    -0.002_001_612_631_813_119,
    0.001_778_942_744_616_595,
    -0.001_593_413_924_275_890_4,
];
const C2_SERIES: [f64; 8] = [
    0.004_133_597_883_597_883_6,
    -0.002_681_327_160_493_827,
    0.001_665_380_658_436_214,
    -0.001_033_763_074_417_009_6,
    0.000_638_902_257_745_493_3,
    -0.000_386_095_165_779_182_84,
    0.000_220_253_534_240_927_78,
    -0.000_109_183_361_550_253,
];

/// Inside this |lambda - 1| band the c_j singular-part cancellation loses
/// digits, so the series take over.
const SERIES_BAND: f64 = 0.15;

fn polyval(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// The Temme transition variable: `eta^2/2 = lambda - 1 - ln lambda`, with
/// `eta` carrying the sign of `lambda - 1`.
pub fn eta_from_lambda(lambda: f64) -> f64 {
    let s = lambda - 1.0;
    if s.abs() < 1e-3 {
        // cancellation in s - ln(1+s); Maclaurin instead
        s * (1.0 + s * polyval(&ETA_SERIES, s))
    } else {
        let h = s - s.ln_1p();
        (2.0 * h).sqrt().copysign(s)
    }
}

/// Scale/shape regime descriptor for the incomplete gamma evaluation.
#[derive(Debug, Clone, Copy)]
pub struct GammaRegime {
    pub a: f64,
    pub lambda: f64,
    pub eta: f64,
}

impl GammaRegime {
    pub fn new(a: f64, lambda: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("gamma regime needs a > 0, got {a}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "gamma regime needs lambda > 0, got {lambda}"
            )));
        }
        Ok(Self {
            a,
            lambda,
            eta: eta_from_lambda(lambda),
        })
    }
}

fn c0_of(s: f64, eta: f64) -> f64 {
    if s.abs() < SERIES_BAND {
        polyval(&C0_SERIES, s)
    } else {
        1.0 / s - 1.0 / eta
    }
}

fn c1_of(s: f64, eta: f64) -> f64 {
    if s.abs() < SERIES_BAND {
        polyval(&C1_SERIES, s)
    } else {
        let s2 = s * s;
        1.0 / (eta * eta * eta) - 1.0 / (s * s2) - 1.0 / s2 - 1.0 / (12.0 * s)
    }
}

fn c2_of(s: f64, eta: f64) -> f64 {
    if s.abs() < SERIES_BAND {
        polyval(&C2_SERIES, s)
    } else {
        let e2 = eta * eta;
        let s2 = s * s;
        let s3 = s2 * s;
        -3.0 / (e2 * e2 * eta)
            + 3.0 / (s2 * s3)
            + 5.0 / (s2 * s2)
            + 25.0 / (12.0 * s3)
            + 1.0 / (12.0 * s2)
            + 1.0 / (288.0 * s)
    }
}

/// Result of the uniform-expansion evaluation.
#[derive(Debug, Clone, Copy)]
pub struct TemmeEval {
    /// P(a, lambda a)
    pub value: f64,
    /// erfc(-eta sqrt(a/2)) / 2
    pub erfc_part: f64,
    /// R_a(eta) truncated at c2
    pub r_part: f64,
    /// false when the direct series/continued-fraction value was returned
    pub temme_used: bool,
}

/// Always evaluate the uniform expansion, regardless of `a` (accuracy decays
/// like a^-3.5 below the production cutoff; still ~1e-9 at a = 100).
pub fn temme_expansion(a: f64, lambda: f64) -> Result<TemmeEval> {
    let regime = GammaRegime::new(a, lambda)?;
    let eta = regime.eta;
    let s = lambda - 1.0;
    let x = eta * (0.5 * a).sqrt();
    let erfc_part = 0.5 * erfc(-x);
    // exp(-a eta^2/2) straight from lambda to avoid squaring eta
    let h = if s.abs() < 1e-3 {
        let e = eta_from_lambda(lambda);
        0.5 * e * e
    } else {
        s - s.ln_1p()
    };
    let pref = (-a * h).exp() / (SQRT_2PI * a.sqrt());
    let c0 = c0_of(s, eta);
    let c1 = c1_of(s, eta);
    let c2 = c2_of(s, eta);
    let r_part = pref * (c0 + (c1 + c2 / a) / a);
    Ok(TemmeEval {
        value: (erfc_part - r_part).clamp(0.0, 1.0),
        erfc_part,
        r_part,
        temme_used: true,
    })
}

/// Uniform-expansion entry point honoring the production cutoff: below
/// [`A_MIN_TEMME`] the direct algorithms are used and flagged in the result.
pub fn reg_inc_gamma_temme(a: f64, lambda: f64) -> Result<TemmeEval> {
    if a >= A_MIN_TEMME {
        temme_expansion(a, lambda)
    } else {
        // erfc_part/r_part are not meaningful on the fallback route
        let (p, _q) = reg_inc_gamma_direct(a, lambda * a)?;
        Ok(TemmeEval {
            value: p,
            erfc_part: p,
            r_part: 0.0,
            temme_used: false,
        })
    }
}

/// ln Gamma(a) for a > 0: Stirling series from 20 up, recurrence lift below.
pub fn ln_gamma(a: f64) -> f64 {
    debug_assert!(a > 0.0);
    const STIRLING: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let mut shift = 1.0;
    let mut x = a;
    while x < 20.0 {
        shift *= x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for &c in STIRLING.iter() {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + corr - shift.ln()
}

/// Series/continued-fraction evaluation of (P, Q), any a > 0. Exposed so the
/// uniform expansion can be cross-checked against an independent route.
pub fn reg_inc_gamma_direct(a: f64, z: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !a.is_finite() || !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!(
            "reg_inc_gamma needs a > 0 and z >= 0, got a={a}, z={z}"
        )));
    }
    if z == 0.0 {
        return Ok((0.0, 1.0));
    }
    if z < a + 1.0 {
        // lower series: P = z^a e^-z / Gamma(a+1) * sum_k prod_i z/(a+i)
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..1_000_000u64 {
            term *= z / (a + k as f64);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        let ln_pref = a * z.ln() - z - ln_gamma(a + 1.0);
        let p = (ln_pref.exp() * sum).clamp(0.0, 1.0);
        Ok((p, 1.0 - p))
    } else {
        // Lentz continued fraction for Q
        let mut b = z + 1.0 - a;
        let mut c = 1e308;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1_000_000u64 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < 1e-300 {
                d = 1e-300;
            }
            c = b + an / c;
            if c.abs() < 1e-300 {
                c = 1e-300;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        let ln_pref = a * z.ln() - z - ln_gamma(a);
        let q = (ln_pref.exp() * h).clamp(0.0, 1.0);
        Ok((1.0 - q, q))
    }
}

/// Regularized incomplete gamma pair `(P(a,z), Q(a,z))`.
pub fn reg_inc_gamma_pair(a: f64, z: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !a.is_finite() || !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!(
            "reg_inc_gamma needs a > 0 and z >= 0, got a={a}, z={z}"
        )));
    }
    if z == 0.0 {
        return Ok((0.0, 1.0));
    }
    if a >= A_MIN_TEMME {
        let lambda = z / a;
        let t = temme_expansion(a, lambda)?;
        // Q through the mirrored erfc argument; both sides stay cancellation-free
        let eta = eta_from_lambda(lambda);
        let x = eta * (0.5 * a).sqrt();
        let q = (0.5 * erfc(x) + t.r_part).clamp(0.0, 1.0);
        Ok((t.value, q))
    } else {
        reg_inc_gamma_direct(a, z)
    }
}

/// Lower regularized incomplete gamma `P(a, z) = gamma(a,z)/Gamma(a)`.
pub fn reg_inc_gamma(a: f64, z: f64) -> Result<f64> {
    Ok(reg_inc_gamma_pair(a, z)?.0)
}

/// `(ln P(a,z), ln Q(a,z))`, usable where the probabilities underflow.
///
/// Each side is fully accurate when the corresponding probability is below
/// 1/2; the other side is then `ln1p(-exp(.))`. In the uniform-expansion
/// regime the deep tails use `x = eta sqrt(a/2)` and the scaled error
/// function: `P = e^(-x^2) [erfcx(|x|)/2 - (c0 + c1/a + c2/a^2)/sqrt(2 pi a)]`
/// for `x << 0` (and mirrored for `x >> 0`), whose bracket is order
/// `1/(|lambda-1| sqrt(a))` with the `1/eta` pieces cancelling exactly.
pub fn ln_reg_inc_gamma_pair(a: f64, z: f64) -> Result<(f64, f64)> {
    use crate::specfn::erf::erfcx;
    if !(a > 0.0) || !a.is_finite() || !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!(
            "ln_reg_inc_gamma needs a > 0 and z >= 0, got a={a}, z={z}"
        )));
    }
    if z == 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    if a < A_MIN_TEMME {
        if z < a + 1.0 {
            let mut term = 1.0f64;
            let mut sum = 1.0f64;
            for k in 1..1_000_000u64 {
                term *= z / (a + k as f64);
                sum += term;
                if term < 1e-17 * sum {
                    break;
                }
            }
            let ln_p = a * z.ln() - z - ln_gamma(a + 1.0) + sum.ln();
            Ok((ln_p, ln1p_mexp(ln_p)))
        } else {
            let mut b = z + 1.0 - a;
            let mut c = 1e308;
            let mut d = 1.0 / b;
            let mut h = d;
            for i in 1..1_000_000u64 {
                let an = -(i as f64) * (i as f64 - a);
                b += 2.0;
                d = an * d + b;
                if d.abs() < 1e-300 {
                    d = 1e-300;
                }
                c = b + an / c;
                if c.abs() < 1e-300 {
                    c = 1e-300;
                }
                d = 1.0 / d;
                let del = d * c;
                h *= del;
                if (del - 1.0).abs() < 1e-16 {
                    break;
                }
            }
            let ln_q = a * z.ln() - z - ln_gamma(a) + h.ln();
            Ok((ln1p_mexp(ln_q), ln_q))
        }
    } else {
        let lambda = z / a;
        let s = lambda - 1.0;
        let eta = eta_from_lambda(lambda);
        let x = eta * (0.5 * a).sqrt();
        let csum = c0_of(s, eta) + (c1_of(s, eta) + c2_of(s, eta) / a) / a;
        if x <= -5.0 {
            let g = 0.5 * erfcx(-x) - csum / (SQRT_2PI * a.sqrt());
            let ln_p = -x * x + g.ln();
            Ok((ln_p, ln1p_mexp(ln_p)))
        } else if x >= 5.0 {
            let g = 0.5 * erfcx(x) + csum / (SQRT_2PI * a.sqrt());
            let ln_q = -x * x + g.ln();
            Ok((ln1p_mexp(ln_q), ln_q))
        } else {
            let (p, q) = reg_inc_gamma_pair(a, z)?;
            Ok((p.ln(), q.ln()))
        }
    }
}

/// `ln(1 - exp(v))` for v <= 0.
fn ln1p_mexp(v: f64) -> f64 {
    if v > -std::f64::consts::LN_2 {
        (-v.exp_m1()).ln()
    } else {
        (-v.exp()).ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_errors() {
        assert!(reg_inc_gamma(-1.0, 1.0).is_err());
        assert!(reg_inc_gamma(0.0, 1.0).is_err());
        assert!(reg_inc_gamma(1.0, -0.5).is_err());
        assert!(reg_inc_gamma(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn exponential_case() {
        // P(1, z) = 1 - exp(-z)
        let p = reg_inc_gamma(1.0, 1.0).unwrap();
        assert!((p - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn zero_argument() {
        assert_eq!(reg_inc_gamma(0.5, 0.0).unwrap(), 0.0);
        assert_eq!(reg_inc_gamma(1e6, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn large_a_diagonal_against_oracle() {
        let p = reg_inc_gamma(1e4, 1e4).unwrap();
        assert!(p > 0.49 && p < 0.51, "P(1e4,1e4) = {p}");
        let oracle = refprec::reg_inc_gamma_p(1e4, 1e4);
        assert!((p - oracle).abs() < 1e-11, "diff {:e}", p - oracle);
    }

    #[test]
    fn temme_at_eta_zero() {
        let t = temme_expansion(1e6, 1.0).unwrap();
        assert_eq!(t.erfc_part, 0.5);
        assert!((t.value - 0.5).abs() < 1e-3); // 0.5 + O(a^-1/2)
        assert!(t.temme_used);
    }

    #[test]
    fn temme_cutoff_metadata() {
        let t = reg_inc_gamma_temme(100.0, 1.2).unwrap();
        assert!(!t.temme_used);
        let t = reg_inc_gamma_temme(1e3, 1.2).unwrap();
        assert!(t.temme_used);
    }

    #[test]
    fn temme_against_dd_oracle() {
        for &(a, lambda) in &[(1e4, 1.2), (1e4, 0.8)] {
            let t = temme_expansion(a, lambda).unwrap();
            let oracle = refprec::reg_inc_gamma_p(a, lambda * a);
            assert!(
                (t.value - oracle).abs() < 1e-10,
                "a={a} lambda={lambda}: {:e}",
                t.value - oracle
            );
        }
    }

    #[test]
    fn regime_consistency_temme_vs_direct() {
        // uniform expansion against the series/CF route, both below and
        // above the production cutoff
        for &a in &[1e2, 1e3, 1e4] {
            for i in 0..=30 {
                let lambda = 0.5 + 1.5 * i as f64 / 30.0;
                let t = temme_expansion(a, lambda).unwrap().value;
                let d = reg_inc_gamma_direct(a, lambda * a).unwrap().0;
                assert!(
                    (t - d).abs() < 1e-9,
                    "a={a} lambda={lambda}: temme={t} direct={d}"
                );
            }
        }
    }

    #[test]
    fn eta_invariant() {
        // eta^2/2 = lambda - 1 - ln lambda, on points where both sides are
        // well conditioned
        for &lambda in &[0.5, 0.8, 0.9, 1.1, 1.5, 2.0, 5.0] {
            let eta = eta_from_lambda(lambda);
            let lhs = 0.5 * eta * eta;
            let rhs = lambda - 1.0 - lambda.ln();
            assert!((lhs - rhs).abs() <= 1e-13 * rhs.abs());
            assert_eq!(eta > 0.0, lambda > 1.0);
        }
        assert_eq!(eta_from_lambda(1.0), 0.0);
    }

    #[test]
    fn eta_series_matches_closed_form_at_band_edge() {
        for &s in &[-1.1e-3f64, 1.1e-3] {
            let closed = (2.0 * (s - s.ln_1p())).sqrt().copysign(s);
            let series = s * (1.0 + s * polyval(&ETA_SERIES, s));
            assert!((closed - series).abs() < 1e-13 * s.abs());
        }
    }

    #[test]
    fn c_coefficients_agree_across_representations() {
        // series vs closed form evaluated at the same points around the band
        // edge; the two must agree to the series truncation level
        for &s in &[-0.15f64, 0.15, -0.12, 0.12, -0.18, 0.18] {
            let eta = eta_from_lambda(1.0 + s);
            let series = [
                polyval(&C0_SERIES, s),
                polyval(&C1_SERIES, s),
                polyval(&C2_SERIES, s),
            ];
            let s2 = s * s;
            let s3 = s2 * s;
            let e2 = eta * eta;
            let closed = [
                1.0 / s - 1.0 / eta,
                1.0 / (eta * eta * eta) - 1.0 / s3 - 1.0 / s2 - 1.0 / (12.0 * s),
                -3.0 / (e2 * e2 * eta)
                    + 3.0 / (s2 * s3)
                    + 5.0 / (s2 * s2)
                    + 25.0 / (12.0 * s3)
                    + 1.0 / (12.0 * s2)
                    + 1.0 / (288.0 * s),
            ];
            for (i, (a, b)) in series.iter().zip(&closed).enumerate() {
                assert!(
                    (a - b).abs() < 2e-9,
                    "c{i} at s={s}: series {a} vs closed {b}"
                );
            }
        }
    }

    #[test]
    fn lemma_tail_bound() {
        // 1 - P(a, z) = O(e^{-z/2}) for fixed a as z grows
        for &z in &[50.0, 100.0] {
            let (_, q) = reg_inc_gamma_pair(2.0, z).unwrap();
            assert!(q <= (-z / 2.0).exp(), "z={z}: q={q:e}");
        }
    }

    #[test]
    fn tricomi_singular_part_form() {
        // N=2 truncation built from the singular parts S(phi_0), S(phi_1)
        // reproduces the direct value to better than 10 a^-2.5
        let a = 1e4;
        for &lambda in &[1.2, 0.8] {
            let s = lambda - 1.0;
            let eta = eta_from_lambda(lambda);
            let s_phi0 = -1.0 / s;
            let s_phi1 = 1.0 / (s * s * s) + 1.0 / (s * s) + 1.0 / (12.0 * s);
            let pref = (-0.5 * a * eta * eta).exp() / SQRT_2PI;
            let corr = pref * (s_phi0 / a.sqrt() + s_phi1 / (a * a.sqrt()));
            let approx = if lambda > 1.0 { 1.0 + corr } else { corr };
            let direct = reg_inc_gamma(a, lambda * a).unwrap();
            assert!(
                (approx - direct).abs() < 10.0 * a.powf(-2.5),
                "lambda={lambda}: err {:e}",
                approx - direct
            );
        }
    }

    #[test]
    fn ln_gamma_anchors() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-13);
        let half = std::f64::consts::PI.sqrt().ln();
        assert!((ln_gamma(0.5) - half).abs() < 1e-13);
    }

    #[test]
    fn monotone_in_z_across_algorithm_seams() {
        for &a in &[0.3, 5.0, 511.0, 513.0, 4096.0] {
            let mut prev = -1.0;
            for i in 0..300 {
                let z = a * (0.2 + 1.8 * i as f64 / 299.0);
                let p = reg_inc_gamma(a, z).unwrap();
                assert!(p >= prev - 1e-14, "a={a} z={z}");
                assert!((0.0..=1.0).contains(&p));
                prev = p;
            }
        }
    }
}
