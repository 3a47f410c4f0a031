//! Moments of the Jain and Jain-Baskakov operators.
//!
//! Closed forms cover orders 0..=2. The numeric route sums the truncated
//! Jain series against exact Beta-integral moments of the inner basis and
//! works for any order; the two are independent computations of the same
//! quantity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{
    check_mu, jain_series_plan, shape_monomial_integral, Accuracy, BaskakovKernel, Growth,
};
use crate::error::{Error, Result};
use crate::operators::{basis_quadrature, Family, OperatorSpec};
use crate::quadrature::{integrate, integrate_to_infinity};

/// Largest `mu` for which sandwich claims are made.
pub const SMALL_MU_MAX: f64 = 0.2;

/// Inflation applied to the sampled sandwich constant.
pub const SANDWICH_MARGIN: f64 = 1.05;

/// Smallest `n` treated as "sufficiently large": `25 (r + 3) c`.
pub fn sufficiently_large_n(r: u32, c: f64) -> u32 {
    (25.0 * f64::from(r + 3) * c).ceil() as u32
}

fn integral_spec(spec: &OperatorSpec) -> Result<()> {
    match spec.family {
        Family::JainBaskakov | Family::JainBaskakovC => spec.validate(),
        other => Err(Error::InvalidSpec(format!(
            "moments are defined for jain-baskakov and jain-baskakov-c, got {other}"
        ))),
    }
}

fn require_order(m: u32, spec: &OperatorSpec) -> Result<()> {
    if m > 2 {
        return Err(Error::UnsupportedOrder(m));
    }
    let c = spec.basis_c();
    let needed = f64::from(spec.r + 1 + m) * c;
    if !(f64::from(spec.n) > needed) {
        return Err(Error::InsufficientN {
            requirement: format!(
                "n > (r + {}) c = {needed} for order {m}, got n = {}",
                1 + m,
                spec.n
            ),
        });
    }
    Ok(())
}

/// `G_n^mu(t^m, x)` for `m <= 2`.
pub fn closed_jain_moment(m: u32, x: f64, n: u32, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let d = 1.0 - mu;
    match m {
        0 => Ok(1.0),
        1 => Ok(x / d),
        2 => Ok(x * x / (d * d) + x / (f64::from(n) * d * d * d)),
        _ => Err(Error::UnsupportedOrder(m)),
    }
}

/// Normalized `K(t^m, x)` for `m <= 2`, `c`-aware.
pub fn closed_k_moment(m: u32, x: f64, spec: &OperatorSpec) -> Result<f64> {
    integral_spec(spec)?;
    require_order(m, spec)?;
    let n = f64::from(spec.n);
    let r = f64::from(spec.r);
    let c = spec.basis_c();
    let d = 1.0 - spec.mu;
    let d1 = n - c * r - 2.0 * c;
    let d2 = n - c * r - 3.0 * c;
    Ok(match m {
        0 => 1.0,
        1 => (n * x + (r + 1.0) * d) / (d1 * d),
        _ => {
            (n * n * x * x / (d * d)
                + (n / (d * d * d) + n * (2.0 * r + 3.0) / d) * x
                + (r + 1.0) * (r + 2.0))
                / (d1 * d2)
        }
    })
}

/// Normalized central moment `T_m(x) = K((t - x)^m, x)` for `m <= 2`.
pub fn closed_central_moment(m: u32, x: f64, spec: &OperatorSpec) -> Result<f64> {
    integral_spec(spec)?;
    require_order(m, spec)?;
    let n = f64::from(spec.n);
    let r = f64::from(spec.r);
    let c = spec.basis_c();
    let mu = spec.mu;
    let d = 1.0 - mu;
    let d1 = n - c * r - 2.0 * c;
    let d2 = n - c * r - 3.0 * c;
    Ok(match m {
        0 => 1.0,
        1 => ((1.0 + r) * d + x * (c * (2.0 + r) * d + n * mu)) / (d1 * d),
        _ => {
            x * x * (1.0 + n * n / (d1 * d2 * d * d) - 2.0 * n / (d1 * d))
                + x * (n * (1.0 + (3.0 + 2.0 * r) * d * d) / (d1 * d2 * d * d * d)
                    - 2.0 * (1.0 + r) / d1)
                + (1.0 + r) * (2.0 + r) / (d1 * d2)
        }
    })
}

fn binomial(m: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * f64::from(m - i) / f64::from(i + 1))
}

/// Normalized moment of any order by series summation over exact
/// Beta-integral moments; `central` expands `(t - x)^m` binomially.
pub fn numeric_moment(
    m: u32,
    x: f64,
    spec: &OperatorSpec,
    acc: &Accuracy,
    central: bool,
) -> Result<f64> {
    integral_spec(spec)?;
    let size = spec.size();
    if !(size > f64::from(m) + 1.0) {
        return Err(Error::DivergentIntegral {
            requirement: format!(
                "n / c > r + m + 1 (n = {}, r = {}, m = {m}, c = {})",
                spec.n,
                spec.r,
                spec.basis_c()
            ),
        });
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("x >= 0 required, got {x}")));
    }
    let c = spec.basis_c();
    let nf = f64::from(spec.n);
    let r = u64::from(spec.r);
    let plan = jain_series_plan(nf * x, spec.mu, acc, Growth::new(m, 1.0 / nf))?;
    let weights: Vec<f64> = (0..=m)
        .map(|j| {
            if central {
                binomial(m, j) * (-x).powi((m - j) as i32)
            } else if j == m {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let sum = plan.sum(|v| {
        Ok(weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(j, &w)| w * shape_monomial_integral(size, v + r, j as u32, c))
            .sum())
    })?;
    Ok(spec.normalizer() * sum)
}

/// `G_n^mu(t^m, x)` by direct series summation.
pub fn numeric_jain_moment(m: u32, x: f64, n: u32, mu: f64, acc: &Accuracy) -> Result<f64> {
    check_mu(mu)?;
    let nf = f64::from(n);
    let plan = jain_series_plan(nf * x, mu, acc, Growth::new(m, 1.0 / nf))?;
    plan.sum(|v| Ok((v as f64 / nf).powi(m as i32)))
}

/// Which moment a report row describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentKind {
    /// `G_n^mu(t^m, x)`.
    Jain,
    /// `K(t^m, x)`.
    Raw,
    /// `T_m(x) = K((t - x)^m, x)`.
    Central,
}

impl MomentKind {
    pub fn name(&self) -> &'static str {
        match self {
            MomentKind::Jain => "jain",
            MomentKind::Raw => "raw",
            MomentKind::Central => "central",
        }
    }
}

/// Closed form against the numeric oracle at one `(kind, m, x, spec)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub kind: MomentKind,
    pub m: u32,
    pub x: f64,
    pub spec: OperatorSpec,
    pub closed: f64,
    pub numeric: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

pub fn moment_report(
    kind: MomentKind,
    m: u32,
    x: f64,
    spec: &OperatorSpec,
    acc: &Accuracy,
) -> Result<MomentReport> {
    let (closed, numeric) = match kind {
        MomentKind::Jain => (
            closed_jain_moment(m, x, spec.n, spec.mu)?,
            numeric_jain_moment(m, x, spec.n, spec.mu, acc)?,
        ),
        MomentKind::Raw => (
            closed_k_moment(m, x, spec)?,
            numeric_moment(m, x, spec, acc, false)?,
        ),
        MomentKind::Central => (
            closed_central_moment(m, x, spec)?,
            numeric_moment(m, x, spec, acc, true)?,
        ),
    };
    let abs_err = (closed - numeric).abs();
    Ok(MomentReport {
        kind,
        m,
        x,
        spec: *spec,
        closed,
        numeric,
        abs_err,
        rel_err: abs_err / closed.abs().max(1e-300),
    })
}

/// Parameter sweep for the moment-identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentGrid {
    pub orders: Vec<u32>,
    pub n: Vec<u32>,
    pub r: Vec<u32>,
    pub mu: Vec<f64>,
    pub c: Vec<f64>,
    pub x: Vec<f64>,
}

impl Default for MomentGrid {
    fn default() -> Self {
        Self {
            orders: vec![0, 1, 2],
            n: vec![10, 20, 50, 100, 200],
            r: vec![0, 1, 2],
            mu: vec![0.0, 0.1, 0.3],
            c: vec![1.0, 2.0],
            x: vec![0.5, 1.0, 2.0, 5.0],
        }
    }
}

impl MomentGrid {
    /// Every valid case, in a fixed order: Jain moments first, then raw and
    /// central moments for each `c`. Cases outside the order's `n` range are
    /// skipped.
    pub fn cases(&self) -> Vec<(MomentKind, u32, f64, OperatorSpec)> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &mu in &self.mu {
                for &x in &self.x {
                    for &m in &self.orders {
                        out.push((MomentKind::Jain, m, x, OperatorSpec::jain(n, mu)));
                    }
                }
            }
        }
        for &c in &self.c {
            for kind in [MomentKind::Raw, MomentKind::Central] {
                for &n in &self.n {
                    for &r in &self.r {
                        for &mu in &self.mu {
                            for &x in &self.x {
                                for &m in &self.orders {
                                    let spec = if c == 1.0 {
                                        OperatorSpec::jain_baskakov(n, r, mu)
                                    } else {
                                        OperatorSpec::jain_baskakov_c(n, r, mu, c)
                                    };
                                    if require_order(m, &spec).is_ok() {
                                        out.push((kind, m, x, spec));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Closed-vs-numeric reports for every case of `grid`, in case order.
pub fn verify_moments(grid: &MomentGrid, acc: &Accuracy) -> Result<Vec<MomentReport>> {
    grid.cases()
        .par_iter()
        .map(|(kind, m, x, spec)| moment_report(*kind, *m, *x, spec, acc))
        .collect()
}

/// Sampled sandwich constant with `x^2 / (n C) <= T_2 <= C x^2 / n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichEstimate {
    pub r: u32,
    pub c: f64,
    pub mu_max: f64,
    /// The constant, including the safety margin.
    pub constant: f64,
    pub n_grid: Vec<u32>,
    pub x_grid: Vec<f64>,
    pub mu_grid: Vec<f64>,
    /// Largest observed `x^2 / (n T_2)`.
    pub worst_lower: f64,
    /// Largest observed `n T_2 / x^2`.
    pub worst_upper: f64,
}

impl SandwichEstimate {
    /// Whether both inequalities hold at one point.
    pub fn holds_at(&self, n: u32, x: f64, mu: f64) -> Result<bool> {
        let spec = moment_spec(n, self.r, mu, self.c);
        let t2 = closed_central_moment(2, x, &spec)?;
        let nf = f64::from(n);
        Ok(x * x / (nf * self.constant) <= t2 && t2 <= self.constant * x * x / nf)
    }
}

/// `K` or `K_c` spec for a given `c`.
pub fn moment_spec(n: u32, r: u32, mu: f64, c: f64) -> OperatorSpec {
    if c == 1.0 {
        OperatorSpec::jain_baskakov(n, r, mu)
    } else {
        OperatorSpec::jain_baskakov_c(n, r, mu, c)
    }
}

/// `k` evenly spaced values on `[0, mu_max]` (a single 0 when `mu_max = 0`).
pub fn mu_grid(mu_max: f64, k: usize) -> Vec<f64> {
    if mu_max == 0.0 || k < 2 {
        return vec![0.0];
    }
    (0..k).map(|i| mu_max * i as f64 / (k - 1) as f64).collect()
}

/// Sandwich constant over `n_grid x x_grid x mu_grid(mu_max, 5)`.
pub fn estimate_sandwich_c(
    r: u32,
    mu_max: f64,
    n_grid: &[u32],
    x_grid: &[f64],
    c: f64,
) -> Result<SandwichEstimate> {
    estimate_sandwich_c_on(r, c, n_grid, x_grid, &mu_grid(mu_max, 5))
}

/// Sandwich constant over an explicit `mu` grid.
pub fn estimate_sandwich_c_on(
    r: u32,
    c: f64,
    n_grid: &[u32],
    x_grid: &[f64],
    mu_values: &[f64],
) -> Result<SandwichEstimate> {
    if n_grid.is_empty() || x_grid.is_empty() || mu_values.is_empty() {
        return Err(Error::Domain("sandwich grids must be nonempty".into()));
    }
    let mu_max = mu_values.iter().copied().fold(0.0, f64::max);
    if mu_values
        .iter()
        .any(|&m| !(0.0..=SMALL_MU_MAX).contains(&m))
    {
        return Err(Error::Domain(format!(
            "mu in [0, {SMALL_MU_MAX}] required for sandwich estimates, got mu_max = {mu_max}"
        )));
    }
    if let Some(&bad) = n_grid
        .iter()
        .find(|&&n| !(f64::from(n) > f64::from(r + 3) * c))
    {
        return Err(Error::InsufficientN {
            requirement: format!(
                "n > (r + 3) c = {} for every grid n, got {bad}",
                f64::from(r + 3) * c
            ),
        });
    }
    if let Some(&bad) = x_grid.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::Domain(format!(
            "x > 0 required on the sandwich grid, got {bad}"
        )));
    }
    let mut worst_lower = 0.0f64;
    let mut worst_upper = 0.0f64;
    for &n in n_grid {
        for &mu in mu_values {
            let spec = moment_spec(n, r, mu, c);
            for &x in x_grid {
                let t2 = closed_central_moment(2, x, &spec)?;
                if !(t2 > 0.0) {
                    return Err(Error::SandwichViolated { n, x, mu, t2 });
                }
                let ratio = f64::from(n) * t2 / (x * x);
                worst_upper = worst_upper.max(ratio);
                worst_lower = worst_lower.max(1.0 / ratio);
            }
        }
    }
    Ok(SandwichEstimate {
        r,
        c,
        mu_max,
        constant: worst_upper.max(worst_lower) * SANDWICH_MARGIN,
        n_grid: n_grid.to_vec(),
        x_grid: x_grid.to_vec(),
        mu_grid: mu_values.to_vec(),
        worst_lower,
        worst_upper,
    })
}

/// Normalized first absolute central moment `K(|t - x|, x)`, by quadrature.
pub fn first_absolute_central_moment(x: f64, spec: &OperatorSpec, acc: &Accuracy) -> Result<f64> {
    integral_spec(spec)?;
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("x >= 0 required, got {x}")));
    }
    let nf = f64::from(spec.n);
    let c = spec.basis_c();
    let shape = nf - f64::from(spec.r) * c;
    let r = u64::from(spec.r);
    let plan = jain_series_plan(nf * x, spec.mu, acc, Growth::new(1, 1.0 / nf))?;
    let g = |t: f64| (t - x).abs();
    let sum = plan.sum(|v| basis_quadrature(&g, &[x], shape, v + r, c, acc))?;
    Ok(spec.normalizer() * sum)
}

/// Side of a tail mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailSide {
    /// `delta(x, y)`: mass on `[0, y]`, `0 <= y < x`.
    Below,
    /// `1 - delta(x, z)`: mass on `[z, inf)`, `z > x`.
    Above,
}

/// Normalized operator mass on `[lo, hi]` (`hi` may be infinite).
pub fn partial_mass(x: f64, lo: f64, hi: f64, spec: &OperatorSpec, acc: &Accuracy) -> Result<f64> {
    integral_spec(spec)?;
    if !(0.0 <= lo && lo <= hi) || !(x >= 0.0) {
        return Err(Error::Domain(format!(
            "0 <= lo <= hi and x >= 0 required, got lo = {lo}, hi = {hi}, x = {x}"
        )));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let nf = f64::from(spec.n);
    let c = spec.basis_c();
    let shape = nf - f64::from(spec.r) * c;
    let r = u64::from(spec.r);
    let plan = jain_series_plan(nf * x, spec.mu, acc, Growth::BOUNDED)?;
    let sum = plan.sum(|v| {
        let kernel = BaskakovKernel::new(shape, v + r, c)?;
        let points = kernel.bulk_points();
        let g = |t: f64| kernel.at(t);
        let q = if hi.is_infinite() {
            integrate_to_infinity(g, lo, &points, acc)?
        } else {
            integrate(g, lo, hi, &points, acc)?
        };
        Ok(q.value)
    })?;
    Ok((spec.normalizer() * sum).clamp(0.0, 1.0))
}

/// Tail masses `delta(x, y)` (below) and `1 - delta(x, z)` (above).
pub fn delta_tail(
    x: f64,
    endpoint: f64,
    side: TailSide,
    spec: &OperatorSpec,
    acc: &Accuracy,
) -> Result<f64> {
    match side {
        TailSide::Below => {
            if !(0.0 <= endpoint && endpoint < x) {
                return Err(Error::Domain(format!(
                    "below-tail endpoint must satisfy 0 <= y < x, got y = {endpoint}, x = {x}"
                )));
            }
            partial_mass(x, 0.0, endpoint, spec, acc)
        }
        TailSide::Above => {
            if !(endpoint > x) || !endpoint.is_finite() {
                return Err(Error::Domain(format!(
                    "above-tail endpoint must satisfy z > x, got z = {endpoint}, x = {x}"
                )));
            }
            partial_mass(x, endpoint, f64::INFINITY, spec, acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn jain_closed_values() {
        assert_eq!(closed_jain_moment(0, 2.0, 5, 0.3).unwrap(), 1.0);
        assert!(rel(closed_jain_moment(1, 3.0, 5, 0.25).unwrap(), 4.0) < 1e-15);
        assert!(rel(closed_jain_moment(2, 1.0, 8, 0.0).unwrap(), 1.125) < 1e-15);
        assert!(matches!(
            closed_jain_moment(3, 1.0, 8, 0.0),
            Err(Error::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn k_closed_values() {
        let s = OperatorSpec::jain_baskakov(10, 1, 0.0);
        assert!(rel(closed_k_moment(1, 2.0, &s).unwrap(), 22.0 / 7.0) < 1e-15);
        // frozen from the series oracle in tests/oracles/gen_oracles.py
        let s2 = OperatorSpec::jain_baskakov(20, 0, 0.1);
        assert!(
            rel(
                closed_k_moment(2, 1.0, &s2).unwrap(),
                1.927_871_468_660_623_8
            ) < 1e-14
        );
        let acc = Accuracy::default();
        assert!(
            rel(
                numeric_moment(2, 1.0, &s2, &acc, false).unwrap(),
                1.927_871_468_660_623_8
            ) < 1e-12
        );
    }

    #[test]
    fn central_closed_values() {
        let s = OperatorSpec::jain_baskakov(6, 0, 0.0);
        assert!(rel(closed_central_moment(1, 1.0, &s).unwrap(), 0.75) < 1e-15);
        assert_eq!(closed_central_moment(0, 1.0, &s).unwrap(), 1.0);
        let s = OperatorSpec::jain_baskakov(30, 1, 0.05);
        let x = 2.0;
        let t2 = closed_central_moment(2, x, &s).unwrap();
        let k = |m| closed_k_moment(m, x, &s).unwrap();
        assert!(rel(t2, k(2) - 2.0 * x * k(1) + x * x * k(0)) < 1e-10);
    }

    #[test]
    fn insufficient_n_is_reported() {
        let s = OperatorSpec::jain_baskakov(4, 1, 0.0);
        assert!(matches!(
            closed_k_moment(2, 1.0, &s),
            Err(Error::InsufficientN { .. })
        ));
        let sc = OperatorSpec::jain_baskakov_c(10, 1, 0.0, 3.5);
        assert!(matches!(
            closed_central_moment(1, 1.0, &sc),
            Err(Error::InsufficientN { .. })
        ));
    }

    #[test]
    fn fourth_central_moment_scales_like_n_minus_two() {
        let acc = Accuracy::default();
        let scaled: Vec<f64> = [40u32, 80, 160]
            .iter()
            .map(|&n| {
                let t4 =
                    numeric_moment(4, 1.0, &OperatorSpec::jain_baskakov(n, 0, 0.0), &acc, true)
                        .unwrap();
                assert!(t4 > 0.0);
                t4 * f64::from(n * n)
            })
            .collect();
        // n^2 T_4 decreases toward 3 (x^2 + 2x)^2 = 27
        assert!(scaled.windows(2).all(|w| w[1] < w[0]), "{scaled:?}");
        assert!(scaled[2] > 27.0 && scaled[0] < 3.0 * 27.0, "{scaled:?}");
        let m0 =
            numeric_moment(0, 1.0, &OperatorSpec::jain_baskakov(40, 0, 0.0), &acc, true).unwrap();
        assert!((m0 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sandwich_single_point_and_permutation() {
        let est = estimate_sandwich_c(0, 0.0, &[100], &[1.0], 1.0).unwrap();
        let t2 = closed_central_moment(2, 1.0, &OperatorSpec::jain_baskakov(100, 0, 0.0)).unwrap();
        let ratio = 100.0 * t2;
        assert!(rel(est.constant, ratio.max(1.0 / ratio) * 1.05) < 1e-15);

        let a = estimate_sandwich_c(1, 0.2, &[100, 200, 400], &[0.25, 1.0, 4.0], 1.0).unwrap();
        let b = estimate_sandwich_c(1, 0.2, &[400, 100, 200], &[4.0, 0.25, 1.0], 1.0).unwrap();
        assert_eq!(a.constant, b.constant);
        assert!(a.constant > 1.0);
    }

    #[test]
    fn sandwich_preconditions() {
        assert!(matches!(
            estimate_sandwich_c(0, 0.1, &[3], &[1.0], 1.0),
            Err(Error::InsufficientN { .. })
        ));
        assert!(estimate_sandwich_c(0, 0.5, &[100], &[1.0], 1.0).is_err());
    }

    #[test]
    fn tails() {
        let acc = Accuracy::default();
        let s = OperatorSpec::jain_baskakov(100, 0, 0.0);
        assert_eq!(
            delta_tail(1.0, 0.0, TailSide::Below, &s, &acc).unwrap(),
            0.0
        );
        assert!(delta_tail(1.0, 1.5, TailSide::Below, &s, &acc).is_err());
        assert!(delta_tail(1.0, 0.5, TailSide::Above, &s, &acc).is_err());
        for &y in &[0.3, 0.9, 1.0, 1.4] {
            let below = partial_mass(1.0, 0.0, y, &s, &acc).unwrap();
            let above = partial_mass(1.0, y, f64::INFINITY, &s, &acc).unwrap();
            assert!((below + above - 1.0).abs() < 1e-9, "y = {y}");
        }
    }

    #[test]
    fn grid_case_count() {
        let cases = MomentGrid::default().cases();
        assert!(cases.len() > 1800 && cases.len() < 2400, "{}", cases.len());
    }
}
