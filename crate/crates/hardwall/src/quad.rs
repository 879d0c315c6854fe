//! Adaptive Gauss-Kronrod quadrature (7-15 pair) with worst-interval-first
//! subdivision. Absolute-tolerance driven; integrands here are smooth or
//! endpoint-regularized, so the plain rule converges quickly.

#![allow(clippy::excessive_precision)] // node tables carry their published digits

use crate::{Error, Result};
use std::collections::BinaryHeap;

/// Positive Kronrod abscissae for the 15-point rule (x = 0 first).
const XGK: [f64; 8] = [
    0.0,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.991_455_371_120_812_639_206_854_697_526_33,
];

const WGK: [f64; 8] = [
    0.209_482_141_084_727_828_012_999_174_891_71,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.063_092_092_629_978_553_290_700_663_189_20,
    0.022_935_322_010_529_224_963_732_008_058_97,
];

/// Gauss weights for nodes XGK[0], XGK[2], XGK[4], XGK[6].
const WG: [f64; 4] = [
    0.417_959_183_673_469_387_755_102_040_816_33,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.129_484_966_168_869_693_270_611_432_679_08,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[0];
    let mut gauss = fc * WG[0];
    for i in 1..8 {
        let dx = h * XGK[i];
        let fsum = f(c - dx) + f(c + dx);
        kronrod += fsum * WGK[i];
        if i % 2 == 0 {
            gauss += fsum * WG[i / 2];
        }
    }
    let value = kronrod * h;
    // The classical (200 d)^1.5 rescaling is overkill for our smooth
    // integrands; the plain Gauss-Kronrod difference is a usable estimate.
    let err = ((kronrod - gauss) * h).abs();
    Segment { a, b, value, err }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_err: 0.0,
            evals: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    const MAX_SEGMENTS: usize = 4000;
    let mut heap = BinaryHeap::new();
    let first = gk15(&f, lo, hi);
    let mut total_err = first.err;
    let mut evals = 15;
    heap.push(first);

    while total_err > abs_tol && heap.len() < MAX_SEGMENTS {
        let worst = heap.pop().expect("heap nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating-point resolution; keep its estimate
            total_err -= worst.err;
            heap.push(Segment { err: 0.0, ..worst });
            continue;
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        evals += 30;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }

    let mut acc = crate::kahan::NeumaierSum::new();
    let mut err_acc = 0.0;
    for seg in heap.iter() {
        acc.add(seg.value);
        err_acc += seg.err;
    }
    if err_acc > abs_tol.max(1e-300) * 16.0 {
        return Err(Error::Quadrature {
            err: err_acc,
            tol: abs_tol,
        });
    }
    Ok(QuadResult {
        value: sign * acc.total(),
        abs_err: err_acc,
        evals,
    })
}

/// Integrate over `[a, b]` split at the interior `breakpoints` (useful for
/// piecewise integrands); points outside `(a, b)` are ignored.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
) -> Result<QuadResult> {
    let mut pts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut edges = vec![a];
    edges.extend(pts);
    edges.push(b);
    let per_tol = abs_tol / edges.len() as f64;
    let mut value = crate::kahan::NeumaierSum::new();
    let mut abs_err = 0.0;
    let mut evals = 0;
    for w in edges.windows(2) {
        let r = integrate(&f, w[0], w[1], per_tol)?;
        value.add(r.value);
        abs_err += r.abs_err;
        evals += r.evals;
    }
    Ok(QuadResult {
        value: value.total(),
        abs_err,
        evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-13).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_tail() {
        // int_0^6 exp(-x^2) dx = sqrt(pi)/2 - tail; tail < 1e-16
        let r = integrate(|x| (-x * x).exp(), 0.0, 6.0, 1e-14).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn mild_log_singularity() {
        // int_0^1 ln(1/x) dx = 1 (integrable endpoint singularity)
        let r = integrate(|x| -(x.max(1e-320)).ln(), 0.0, 1.0, 1e-11).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "got {}", r.value);
    }

    #[test]
    fn orientation_flips_sign() {
        let fwd = integrate(|x| x.cos(), 0.0, 1.0, 1e-13).unwrap();
        let rev = integrate(|x| x.cos(), 1.0, 0.0, 1e-13).unwrap();
        assert!((fwd.value + rev.value).abs() < 1e-15);
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let r = integrate_with_breakpoints(f, 0.0, 1.0, &[0.3], 1e-12).unwrap();
        assert!((r.value - 1.7).abs() < 1e-12);
    }
}
