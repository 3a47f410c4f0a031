//! Globally adaptive Gauss-Kronrod (7/15) quadrature on finite and
//! semi-infinite intervals.
//!
//! `[lo, inf)` is mapped onto `[0, 1)` with `t = lo + u / (1 - u)`. Callers
//! seed the initial partition with points where the integrand has kinks or
//! concentrated mass; the panel with the largest error estimate is bisected
//! until the summed estimate drops below `quad_rel_eps` times the integral of
//! `|g|`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::basis::Accuracy;
use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn gk15<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let abs = res_abs * half.abs();
    let asc = res_asc * half.abs();
    if !value.is_finite() || !abs.is_finite() {
        return Err(Error::Domain(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    Ok(Panel {
        a,
        b,
        value,
        error: rescale_error((res_k - res_g) * half, abs, asc),
        abs,
    })
}

fn adaptive<F: Fn(f64) -> f64>(g: &F, cuts: &[f64], acc: &Accuracy) -> Result<Quadrature> {
    let mut heap = BinaryHeap::new();
    for w in cuts.windows(2) {
        heap.push(gk15(g, w[0], w[1])?);
    }
    loop {
        let (value, error, abs) = heap.iter().fold((0.0, 0.0, 0.0), |(v, e, s), p| {
            (v + p.value, e + p.error, s + p.abs)
        });
        if error <= acc.quad_rel_eps * abs || error <= f64::MIN_POSITIVE {
            // deterministic final sum in abscissa order
            let mut panels: Vec<Panel> = heap.into_vec();
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value = panels.iter().map(|p| p.value).sum();
            return Ok(Quadrature {
                value,
                abs_error: error,
                panels: panels.len(),
            });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if heap.len() + 2 > acc.panel_cap || mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureNoConvergence {
                panels: heap.len() + 1,
                estimate: value,
                error,
            });
        }
        heap.push(gk15(g, worst.a, mid)?);
        heap.push(gk15(g, mid, worst.b)?);
    }
}

fn partition(lo: f64, hi: f64, uniform: usize, points: &[f64]) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..=uniform)
        .map(|i| lo + (hi - lo) * i as f64 / uniform as f64)
        .chain(points.iter().copied().filter(|&p| p > lo && p < hi))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (hi - lo));
    cuts
}

/// `int_a^b g(t) dt` with the initial partition refined at `points`.
pub fn integrate<F: Fn(f64) -> f64>(
    g: F,
    a: f64,
    b: f64,
    points: &[f64],
    acc: &Accuracy,
) -> Result<Quadrature> {
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "finite a <= b required, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            abs_error: 0.0,
            panels: 0,
        });
    }
    adaptive(&g, &partition(a, b, 4, points), acc)
}

/// `int_lo^inf g(t) dt`; `points` are abscissae in `t`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    g: F,
    lo: f64,
    points: &[f64],
    acc: &Accuracy,
) -> Result<Quadrature> {
    if !lo.is_finite() {
        return Err(Error::Domain(format!(
            "finite lower limit required, got {lo}"
        )));
    }
    let mapped = |u: f64| {
        let w = 1.0 - u;
        let t = lo + u / w;
        if !t.is_finite() {
            return 0.0;
        }
        let y = g(t);
        if y == 0.0 {
            0.0
        } else {
            y / (w * w)
        }
    };
    let upoints: Vec<f64> = points
        .iter()
        .filter(|&&t| t > lo && t.is_finite())
        .map(|&t| (t - lo) / (1.0 + t - lo))
        .collect();
    adaptive(&mapped, &partition(0.0, 1.0, 8, &upoints), acc)
}

/// `int_0^inf g(t) dt` with the default partition.
pub fn semiinf_quadrature<F: Fn(f64) -> f64>(g: F, acc: &Accuracy) -> Result<f64> {
    integrate_to_infinity(g, 0.0, &[], acc).map(|q| q.value)
}
