//! Error function family: erf, erfc, the scaled erfcx(x) = exp(x^2) erfc(x),
//! and ln erfc as a total function on finite reals.
//!
//! Rational approximations are the classical FreeBSD msun / fdlibm ones
//! (s_erf.c); the scaled and log variants reuse the same internals, which is
//! what keeps them accurate where exp(-x^2) underflows.

#![allow(clippy::excessive_precision)] // coefficient tables carry their published digits

const ERX: f64 = 8.450_629_115_104_675_3e-1;

// |x| < 0.84375: erf(x) = x + x*P(x^2)/Q(x^2)
const EFX: f64 = 1.283_791_670_955_125_9e-1;
const EFX8: f64 = 1.027_033_336_764_100_7;
const PP0: f64 = 1.283_791_670_955_125_6e-1;
const PP1: f64 = -3.250_421_072_470_015e-1;
const PP2: f64 = -2.848_174_957_559_851e-2;
const PP3: f64 = -5.770_270_296_489_442e-3;
const PP4: f64 = -2.376_301_665_665_016_3e-5;
const QQ1: f64 = 3.979_172_239_591_553_5e-1;
const QQ2: f64 = 6.502_224_998_876_729e-2;
const QQ3: f64 = 5.081_306_281_875_766e-3;
const QQ4: f64 = 1.324_947_380_043_216_4e-4;
const QQ5: f64 = -3.960_228_278_775_368e-6;

// 0.84375 <= |x| < 1.25: erf(x) = sign * (ERX + P1(s)/Q1(s)), s = |x|-1
const PA0: f64 = -2.362_118_560_752_659_4e-3;
const PA1: f64 = 4.148_561_186_837_483_4e-1;
const PA2: f64 = -3.722_078_760_357_013_3e-1;
const PA3: f64 = 3.183_466_199_011_617_5e-1;
const PA4: f64 = -1.108_946_942_823_966_8e-1;
const PA5: f64 = 3.547_830_432_561_823_6e-2;
const PA6: f64 = -2.166_375_594_868_790_8e-3;
const QA1: f64 = 1.064_208_804_008_442_3e-1;
const QA2: f64 = 5.403_979_177_021_710_5e-1;
const QA3: f64 = 7.182_865_441_419_627e-2;
const QA4: f64 = 1.261_712_198_087_616_4e-1;
const QA5: f64 = 1.363_708_391_202_905e-2;
const QA6: f64 = 1.198_449_984_679_910_7e-2;

// 1.25 <= x < 1/0.35: fit to ln(erfc(x)*x) + x^2 + 0.5625 in s = 1/x^2
const RA0: f64 = -9.864_944_034_847_148e-3;
const RA1: f64 = -6.938_585_727_071_818e-1;
const RA2: f64 = -1.055_862_622_532_329_1e1;
const RA3: f64 = -6.237_533_245_032_6e1;
const RA4: f64 = -1.623_966_694_625_734_7e2;
const RA5: f64 = -1.846_050_929_067_110_4e2;
const RA6: f64 = -8.128_743_550_630_659e1;
const RA7: f64 = -9.814_329_344_169_145;
const SA1: f64 = 1.965_127_166_743_925_7e1;
const SA2: f64 = 1.376_577_541_435_190_4e2;
const SA3: f64 = 4.345_658_774_752_292_3e2;
const SA4: f64 = 6.453_872_717_332_679e2;
const SA5: f64 = 4.290_081_400_275_678_3e2;
const SA6: f64 = 1.086_350_055_417_794_4e2;
const SA7: f64 = 6.570_249_770_319_282;
const SA8: f64 = -6.042_441_521_485_81e-2;

// 1/0.35 <= x < 28
const RB0: f64 = -9.864_942_924_700_099e-3;
const RB1: f64 = -7.992_832_376_805_23e-1;
const RB2: f64 = -1.775_795_491_775_475_2e1;
const RB3: f64 = -1.606_363_848_558_219_2e2;
const RB4: f64 = -6.375_664_433_683_896e2;
const RB5: f64 = -1.025_095_131_611_077_2e3;
const RB6: f64 = -4.835_191_916_086_514e2;
const SB1: f64 = 3.033_806_074_348_246e1;
const SB2: f64 = 3.257_925_129_965_739_2e2;
const SB3: f64 = 1.536_729_586_084_437e3;
const SB4: f64 = 3.199_858_219_508_595_4e3;
const SB5: f64 = 2.553_050_406_433_164_4e3;
const SB6: f64 = 4.745_285_412_069_554e2;
const SB7: f64 = -2.244_095_244_658_581_8e1;

const TINY: f64 = 1e-300;
const SMALL: f64 = 3.725_290_298_461_914e-9; // 2^-28
const SQRT_PI: f64 = 1.772_453_850_905_516;

/// `ln(erfc(x) * x) + x^2` for x >= 1.25: the fdlibm rationals approximate
/// this plus 0.5625, folded back in here.
fn log_tail(x: f64) -> f64 {
    debug_assert!(x >= 1.25);
    let s = 1.0 / (x * x);
    let rs = if x < 1.0 / 0.35 {
        let r =
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7))))));
        let q = 1.0
            + s * (SA1
                + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8)))))));
        r / q
    } else {
        let r = RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6)))));
        let q =
            1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7))))));
        r / q
    };
    rs - 0.5625
}

/// `-x^2` split as `-z^2 + (z-x)(z+x)` with z = x rounded to 32 bits, so the
/// exp() argument keeps its low-order bits (fdlibm trick).
fn neg_x2_split(x: f64) -> (f64, f64) {
    let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    (-z * z, (z - x) * (z + x))
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return -1.0;
    }
    let sign = x < 0.0;
    let x = x.abs();
    let val = if x < 0.84375 {
        if x < SMALL {
            if x < 2.848_094_538_889_218e-306 {
                0.125 * (8.0 * x + EFX8 * x)
            } else {
                x + EFX * x
            }
        } else {
            let z = x * x;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            x + x * (r / s)
        }
    } else if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        ERX + p / q
    } else if x >= 6.0 {
        1.0 - TINY
    } else {
        let (a, b) = neg_x2_split(x);
        let r = (a + b + log_tail(x)).exp() / x;
        1.0 - r
    };
    if sign {
        -val
    } else {
        val
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return 2.0;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 0.84375 {
        if x < SMALL {
            return 1.0 - (x + EFX * x);
        }
        let z = x * x;
        let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
        let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
        let y = r / s;
        if x < 0.25 {
            1.0 - (x + x * y)
        } else {
            let r2 = x * y + (x - 0.5);
            0.5 - r2
        }
    } else if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        (1.0 - ERX) - p / q
    } else if x < 28.0 {
        let (a, b) = neg_x2_split(x);
        (a + b + log_tail(x)).exp() / x
    } else {
        0.0
    }
}

/// Asymptotic `sqrt(pi) x erfcx(x) = sum (-1)^k (2k-1)!! u^k`, u = 1/(2x^2),
/// truncated at the first nonimproving term. Used for x >= 28 where the
/// rational fits end; there the series is far below f64 epsilon.
fn scaled_series(x: f64) -> f64 {
    let u = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let next = -term * (2.0 * k as f64 - 1.0) * u;
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// Scaled complementary error function `exp(x^2) erfc(x)`.
///
/// Overflows to `inf` for x below about -26.6, where `exp(x^2)` does.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 1.25 {
        (x * x).exp() * erfc(x)
    } else if x < 28.0 {
        log_tail(x).exp() / x
    } else {
        scaled_series(x) / (x * SQRT_PI)
    }
}

/// `ln erfc(x)`, accurate for all finite x (no underflow for large x).
pub fn ln_erfc(x: f64) -> f64 {
    if x < 0.84375 {
        // erfc in (0.23, 2): direct log is fully accurate
        erfc(x).ln()
    } else if x < 1.25 {
        erfc(x).ln()
    } else if x < 28.0 {
        let (a, b) = neg_x2_split(x);
        a + b + log_tail(x) - x.ln()
    } else {
        // series value is 1 + O(1/x^2); keep the log of the correction exact
        -x * x - (x * SQRT_PI).ln() + (scaled_series(x) - 1.0).ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    /// Quadrature oracle: with t = c + s,
    /// erfc(c) = (2/sqrt(pi)) e^(-c^2) int_0^inf e^(-2cs - s^2) ds;
    /// factoring e^(-c^2) keeps the integrand O(1) so the absolute tolerance
    /// controls the relative error.
    fn erfc_by_quadrature(c: f64) -> f64 {
        let smax = (60.0 / (2.0 * c.max(0.0) + 1.0) + 3.0).min(12.0);
        let r = integrate(|s| (-2.0 * c * s - s * s).exp(), 0.0, smax, 1e-16).unwrap();
        2.0 / SQRT_PI * (-c * c).exp() * r.value
    }

    #[test]
    fn basic_values() {
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erfc(0.0), 1.0);
        assert_eq!(ln_erfc(0.0), 0.0);
        assert_eq!(erfc(f64::INFINITY), 0.0);
        assert_eq!(erfc(f64::NEG_INFINITY), 2.0);
    }

    #[test]
    fn odd_symmetry_and_complement() {
        for i in 0..200 {
            let x = -6.0 + 12.0 * (i as f64) / 199.0;
            assert!((erf(-x) + erf(x)).abs() < 1e-15);
            assert!((erf(x) + erfc(x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_quadrature_oracle() {
        for &c in &[0.1, 0.5, 1.0, 1.7, 2.5, 4.0, 6.5] {
            let oracle = erfc_by_quadrature(c);
            let rel = (erfc(c) - oracle).abs() / oracle;
            assert!(rel < 5e-14, "erfc({c}) rel err {rel:.2e}");
        }
    }

    #[test]
    fn ln_erfc_consistency() {
        // against direct log where erfc is representable
        for i in 0..400 {
            let x = -20.0 + 45.0 * (i as f64) / 399.0;
            let direct = erfc(x);
            if direct > 1e-290 {
                let rel = (ln_erfc(x) - direct.ln()).abs() / direct.ln().abs().max(1.0);
                assert!(rel < 1e-12, "x={x} rel={rel:.2e}");
            }
        }
    }

    #[test]
    fn ln_erfc_one_vs_oracle() {
        let oracle = erfc_by_quadrature(1.0).ln();
        assert!((ln_erfc(1.0) - oracle).abs() < 1e-13);
    }

    #[test]
    fn ln_erfc_large_x_leading_asymptotics() {
        let x: f64 = 30.0;
        let leading = -x * x - (x * SQRT_PI).ln();
        assert!((ln_erfc(x) / leading - 1.0).abs() < 1e-3);
        // and the branch seam at 28 is continuous
        let a = ln_erfc(27.999_999);
        let b = ln_erfc(28.000_001);
        assert!((a - b).abs() < 1e-4 * a.abs());
    }

    #[test]
    fn erfcx_consistent_with_erfc() {
        for &x in &[0.0, 0.3, 1.0, 1.2, 1.3, 2.0, 5.0, 10.0, 25.0] {
            let lhs = erfcx(x) * (-x * x).exp();
            let rel = (lhs - erfc(x)).abs() / erfc(x);
            assert!(rel < 1e-13, "x={x} rel={rel:.2e}");
        }
        for &x in &[-0.5, -1.5, -3.0] {
            let lhs = erfcx(x) * (-x * x).exp();
            assert!((lhs - erfc(x)).abs() / erfc(x) < 1e-13);
        }
    }

    #[test]
    fn erfcx_asymptote() {
        // sqrt(pi) x erfcx(x) = 1 - u + 3u^2 - ..., u = 1/(2x^2)
        for &x in &[30.0, 100.0, 1e4] {
            let v = erfcx(x) * x * SQRT_PI;
            let u = 1.0 / (2.0 * x * x);
            assert!((v - (1.0 - u)).abs() < 4.0 * u * u + 1e-15, "x={x} v={v}");
        }
    }
}
