//! Unevaluated-sum double-double arithmetic (Dekker/Knuth error-free
//! transforms). Roughly 32 significant digits; plenty of headroom for
//! certifying 1e-10 .. 1e-13 targets.

/// A double-double value `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

/// ln(2*pi)/2
pub(crate) const LN_SQRT_2PI: Dd = Dd {
    hi: 0.918_938_533_204_672_8,
    lo: -3.878_294_158_067_241_4e-17,
};

#[allow(clippy::should_implement_trait)] // plain methods suffice for the oracle
impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact-integer ratio `num/den` to dd precision.
    pub fn ratio(num: i64, den: i64) -> Dd {
        Dd::from_f64(num as f64).div(Dd::from_f64(den as f64))
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Dd {
        self.add(Dd::from_f64(b))
    }

    #[inline]
    pub fn sub(self, b: Dd) -> Dd {
        self.add(b.neg())
    }

    pub fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + self.hi * b.lo + self.lo * b.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self.sub(b.mul_f64(q1));
        let q2 = r.hi / b.hi;
        let r = r.sub(b.mul_f64(q2));
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add_f64(q3)
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            self.neg()
        } else {
            self
        }
    }

    #[inline]
    pub fn lt(self, b: Dd) -> bool {
        self.hi < b.hi || (self.hi == b.hi && self.lo < b.lo)
    }

    /// exp(self). Returns 0 for arguments below -746 and inf above 710.
    pub fn exp(self) -> Dd {
        let x = self;
        if x.hi < -746.0 {
            return Dd::ZERO;
        }
        if x.hi > 710.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        let k = (x.hi / LN2.hi).round();
        let r = x.sub(LN2.mul_f64(k));
        // Taylor on |r| <= ln2/2; divide by the exact integer in dd (a
        // rounded 1/n constant would cap accuracy near 1e-19)
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..40 {
            term = term.mul(r).div(Dd::from_f64(n as f64));
            sum = sum.add(term);
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        let scale = libm_ldexp(1.0, k as i32);
        Dd {
            hi: sum.hi * scale,
            lo: sum.lo * scale,
        }
    }

    /// Natural log for positive values.
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0);
        let l0 = self.hi.ln();
        // r = x * exp(-l0) - 1 is O(1e-16); two ln1p terms suffice.
        let r = self.mul(Dd::from_f64(-l0).exp()).sub(Dd::ONE);
        let ln1p = r.sub(r.mul(r).mul_f64(0.5));
        Dd::from_f64(l0).add(ln1p)
    }
}

fn libm_ldexp(x: f64, e: i32) -> f64 {
    // Scale by 2^e without a libm dependency; e stays within +-1100 here.
    let mut v = x;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_mul_roundtrip() {
        // dd-exact tenths, unlike the f64 literals 0.1 and 0.2
        let a = Dd::ratio(1, 10).add(Dd::ratio(2, 10));
        let b = Dd::ratio(3, 10);
        assert!(a.sub(b).to_f64().abs() < 1e-32);
        let c = Dd::ratio(7, 10).mul(Dd::ratio(3, 7)).sub(Dd::ratio(3, 10));
        assert!(c.to_f64().abs() < 1e-32);
    }

    #[test]
    fn div_inverse() {
        let x = Dd::ratio(7, 13);
        let y = Dd::ONE.div(x).mul(x);
        assert!(y.sub(Dd::ONE).to_f64().abs() < 1e-30);
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &v in &[1e-8, 0.5, 1.0, 3.25, 17.0, 300.0] {
            let x = Dd::from_f64(v);
            let r = x.ln().exp().sub(x);
            assert!(
                (r.to_f64() / v).abs() < 1e-29,
                "roundtrip failed at {v}: {:?}",
                r
            );
        }
    }

    #[test]
    fn exp_matches_f64_scale() {
        let x = Dd::from_f64(1.0);
        assert!((x.exp().to_f64() - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn exp_underflow_is_zero() {
        assert_eq!(Dd::from_f64(-1.0e4).exp().to_f64(), 0.0);
    }
}
