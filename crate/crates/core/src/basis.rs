//! Jain (generalized Poisson) weights, Baskakov weights and their monomial
//! integrals.
//!
//! Every weight is produced in log space and exponentiated last; the direct
//! form `(a + v mu)^(v-1) / v!` overflows for `v` beyond ~150.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{bd0, ln_poisson_pmf, stirlerr, CompensatedSum};

/// Largest admissible `mu`. The generalized-Poisson mean `a / (1 - mu)`
/// diverges as `mu -> 1` and the series stops being summable in practice.
pub const MU_MAX: f64 = 0.99;

pub(crate) fn check_mu(mu: f64) -> Result<()> {
    if !(0.0..=MU_MAX).contains(&mu) {
        return Err(Error::Domain(format!("mu in [0, 0.99] required, got {mu}")));
    }
    Ok(())
}

/// Arguments of one Jain weight `omega_mu(v, a)` with `a = n x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JainWeightArgs {
    pub a: f64,
    pub mu: f64,
    pub v: u64,
}

impl JainWeightArgs {
    pub fn new(a: f64, mu: f64, v: u64) -> Result<Self> {
        let args = Self { a, mu, v };
        args.validate()?;
        Ok(args)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::Domain(format!(
                "a = n x > 0 required, got {}",
                self.a
            )));
        }
        check_mu(self.mu)
    }
}

/// Arguments of one (generalized) Baskakov weight `p_{shape,v}(t, c)`.
///
/// `shape` is the `n`-slot of the basis; the Gamma arguments use `shape / c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaskakovArgs {
    pub shape: f64,
    pub v: u64,
    pub t: f64,
    pub c: f64,
}

impl BaskakovArgs {
    pub fn new(shape: f64, v: u64, t: f64, c: f64) -> Result<Self> {
        let args = Self { shape, v, t, c };
        args.validate()?;
        Ok(args)
    }

    /// Classical Baskakov weight (`c = 1`).
    pub fn classical(shape: f64, v: u64, t: f64) -> Result<Self> {
        Self::new(shape, v, t, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.shape > 0.0) || !self.shape.is_finite() {
            return Err(Error::Domain(format!(
                "shape > 0 required, got {}",
                self.shape
            )));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::Domain(format!("c > 0 required, got {}", self.c)));
        }
        if !(self.t >= 0.0) {
            return Err(Error::Domain(format!("t >= 0 required, got {}", self.t)));
        }
        Ok(())
    }
}

/// Series-truncation and quadrature tolerances with hard caps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    /// Target tail mass of the truncated Jain series.
    pub series_eps: f64,
    /// Relative tolerance of every inner quadrature.
    pub quad_rel_eps: f64,
    /// Hard ceiling on the series index.
    pub v_cap: usize,
    /// Hard ceiling on quadrature panels per integral.
    pub panel_cap: usize,
}

impl Default for Accuracy {
    fn default() -> Self {
        Self {
            series_eps: 1e-13,
            quad_rel_eps: 1e-10,
            v_cap: 200_000,
            panel_cap: 4_000,
        }
    }
}

impl Accuracy {
    /// Split a total tolerance evenly between series truncation and
    /// quadrature.
    pub fn from_tolerance(tol: f64) -> Result<Self> {
        let acc = Self {
            series_eps: 0.5 * tol,
            quad_rel_eps: 0.5 * tol,
            ..Self::default()
        };
        acc.validate()?;
        Ok(acc)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = 0.0..1.0;
        if !unit.contains(&self.series_eps) || self.series_eps == 0.0 {
            return Err(Error::Domain("series_eps in (0, 1) required".into()));
        }
        if !unit.contains(&self.quad_rel_eps) || self.quad_rel_eps == 0.0 {
            return Err(Error::Domain("quad_rel_eps in (0, 1) required".into()));
        }
        if self.v_cap < 1 || self.panel_cap < 1 {
            return Err(Error::Domain(
                "v_cap >= 1 and panel_cap >= 1 required".into(),
            ));
        }
        Ok(())
    }

    /// Total error budget reported alongside evaluated values.
    pub fn budget(&self) -> f64 {
        self.series_eps + self.quad_rel_eps
    }
}

fn ln_jain_unchecked(a: f64, mu: f64, v: u64) -> f64 {
    if v == 0 {
        return -a;
    }
    // omega = a / (a + v mu) * Poisson(v; a + v mu)
    let lambda = a + v as f64 * mu;
    a.ln() - lambda.ln() + ln_poisson_pmf(v, lambda)
}

/// `ln omega_mu(v, a)`; `v = 0` gives exactly `-a`.
pub fn jain_log_weight(args: JainWeightArgs) -> Result<f64> {
    args.validate()?;
    Ok(ln_jain_unchecked(args.a, args.mu, args.v))
}

/// `omega_mu(v, a)`, underflowing to zero.
pub fn jain_weight(args: JainWeightArgs) -> Result<f64> {
    jain_log_weight(args).map(f64::exp)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps in (0, 1) required, got {eps}")));
    }
    Ok(())
}

/// Smallest `V <= v_cap` with accumulated mass above `1 - eps` and the last
/// weight below `eps` times the running mass.
pub fn jain_truncation_index(a: f64, mu: f64, eps: f64, v_cap: usize) -> Result<u64> {
    JainWeightArgs::new(a, mu, 0)?;
    check_eps(eps)?;
    let mut mass = CompensatedSum::new();
    for v in 0..=v_cap as u64 {
        let w = ln_jain_unchecked(a, mu, v).exp();
        mass.add(w);
        let m = mass.value();
        if m > 1.0 - eps && w < eps * m {
            return Ok(v);
        }
    }
    Err(Error::TruncationCapExceeded { a, mu, v_cap })
}

/// Polynomial growth of the inner factor of a series term, `t ~ v * scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub degree: u32,
    pub scale: f64,
}

impl Growth {
    pub const BOUNDED: Growth = Growth {
        degree: 0,
        scale: 1.0,
    };

    pub fn new(degree: u32, scale: f64) -> Self {
        Self { degree, scale }
    }

    fn factor(&self, v: u64) -> f64 {
        if self.degree == 0 {
            1.0
        } else {
            1.0 + (v as f64 * self.scale).powi(self.degree as i32)
        }
    }
}

/// The terms of a truncated Jain series worth evaluating.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPlan {
    /// `(v, omega_mu(v, a))`, ascending in `v`.
    pub terms: Vec<(u64, f64)>,
    /// Truncation index `V`.
    pub last: u64,
    /// `1 - sum_{v <= V} omega`, clamped at zero.
    pub tail_mass: f64,
}

impl SeriesPlan {
    /// `sum_v omega_v g(v)` over the planned terms, compensated.
    pub fn sum<F>(&self, mut g: F) -> Result<f64>
    where
        F: FnMut(u64) -> Result<f64>,
    {
        let mut acc = CompensatedSum::new();
        for &(v, w) in &self.terms {
            acc.add(w * g(v)?);
        }
        Ok(acc.value())
    }
}

/// Plan the truncated series `sum_v omega_mu(v, a) g(v)`.
///
/// The index is the truncation index of [`jain_truncation_index`]; for a
/// growing inner factor it is raised until the last quarter of the terms,
/// weighted by `1 + (v scale)^degree`, carries less than `eps` of the total.
/// Terms whose weighted size is below `1e-3 eps / (V + 1)` of the total are
/// dropped from the plan. `a = 0` is the point mass at `v = 0`.
pub fn jain_series_plan(a: f64, mu: f64, acc: &Accuracy, growth: Growth) -> Result<SeriesPlan> {
    check_mu(mu)?;
    acc.validate()?;
    if a == 0.0 {
        return Ok(SeriesPlan {
            terms: vec![(0, 1.0)],
            last: 0,
            tail_mass: 0.0,
        });
    }
    JainWeightArgs::new(a, mu, 0)?;
    let eps = acc.series_eps;
    let mut weights = Vec::new();
    let mut prefix = vec![0.0];
    let mut mass = CompensatedSum::new();
    let mut last = None;
    for v in 0..=acc.v_cap as u64 {
        let w = ln_jain_unchecked(a, mu, v).exp();
        weights.push(w);
        mass.add(w);
        let proxy = w * growth.factor(v);
        prefix.push(prefix[prefix.len() - 1] + proxy);
        let m = mass.value();
        if m > 1.0 - eps && w < eps * m {
            if growth.degree == 0 {
                last = Some(v);
                break;
            }
            let len = (v as usize + 1).div_ceil(4);
            let end = v as usize + 1;
            let window = prefix[end] - prefix[end - len];
            if window < eps * prefix[end] {
                last = Some(v);
                break;
            }
        }
    }
    let last = last.ok_or(Error::TruncationCapExceeded {
        a,
        mu,
        v_cap: acc.v_cap,
    })?;
    let total = prefix[prefix.len() - 1];
    let floor = 1e-3 * eps * total / (last as f64 + 1.0);
    let terms = weights
        .iter()
        .enumerate()
        .filter(|&(v, &w)| w * growth.factor(v as u64) > floor)
        .map(|(v, &w)| (v as u64, w))
        .collect();
    Ok(SeriesPlan {
        terms,
        last,
        tail_mass: (1.0 - mass.value()).max(0.0),
    })
}

/// One generalized Baskakov weight `p_{shape,k}(., c)` with its
/// `t`-independent constants precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaskakovKernel {
    size: f64,
    k: u64,
    c: f64,
    log_const: f64,
}

impl BaskakovKernel {
    pub fn new(shape: f64, k: u64, c: f64) -> Result<Self> {
        BaskakovArgs::new(shape, k, 0.0, c)?;
        let size = shape / c;
        let log_const = if k == 0 {
            0.0
        } else {
            let kf = k as f64;
            let total = size + kf;
            (size / total).ln() + stirlerr(total)
                - stirlerr(size)
                - stirlerr(kf)
                - 0.5 * ((2.0 * std::f64::consts::PI).ln() + size.ln() + (kf / total).ln())
        };
        Ok(Self {
            size,
            k,
            c,
            log_const,
        })
    }

    pub fn ln_at(&self, t: f64) -> f64 {
        if t == 0.0 {
            return if self.k == 0 { 0.0 } else { f64::NEG_INFINITY };
        }
        if !t.is_finite() {
            return f64::NEG_INFINITY;
        }
        let ct = self.c * t;
        if self.k == 0 {
            return -self.size * ct.ln_1p();
        }
        let p = 1.0 / (1.0 + ct);
        let q = ct / (1.0 + ct);
        let total = self.size + self.k as f64;
        self.log_const - bd0(self.size, total * p) - bd0(self.k as f64, total * q)
    }

    pub fn at(&self, t: f64) -> f64 {
        self.ln_at(t).exp()
    }

    /// Abscissae around the bulk of the weight, for seeding quadrature panels.
    pub fn bulk_points(&self) -> Vec<f64> {
        // in u = ct / (1 + ct) the weight times dt is a Beta(k + 1, size - 1) shape
        let alpha = self.k as f64 + 1.0;
        let beta = (self.size - 1.0).max(0.5);
        let mean = alpha / (alpha + beta);
        let sd = (mean * (1.0 - mean) / (alpha + beta + 1.0)).sqrt();
        [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|j| mean + j * sd)
            .filter(|&u| u > 0.0 && u < 1.0)
            .map(|u| u / (self.c * (1.0 - u)))
            .collect()
    }
}

/// `ln p_{shape,v}(t, c)`; `t = 0` gives `0` for `v = 0` and `-inf` otherwise.
pub fn baskakov_log_weight(args: BaskakovArgs) -> Result<f64> {
    args.validate()?;
    Ok(BaskakovKernel::new(args.shape, args.v, args.c)?.ln_at(args.t))
}

pub fn baskakov_weight(args: BaskakovArgs) -> Result<f64> {
    baskakov_log_weight(args).map(f64::exp)
}

/// `int_0^inf p_{shape,k}(t, c) t^m dt` for `shape / c > m + 1`:
/// `c^-(m+1) (k+1)...(k+m) / ((s-1)(s-2)...(s-m-1))` with `s = shape / c`.
pub(crate) fn shape_monomial_integral(size: f64, k: u64, m: u32, c: f64) -> f64 {
    let kf = k as f64;
    let mut num = 1.0;
    for j in 1..=m {
        num *= kf + f64::from(j);
    }
    let mut den = 1.0;
    for j in 1..=m + 1 {
        den *= size - f64::from(j);
    }
    num / den / c.powi(m as i32 + 1)
}

/// `int_0^inf p_{n - r c, v + r}(t, c) t^m dt` in closed form.
///
/// For `c = 1`, `m = 0` this is `1 / (n - r - 1)`.
pub fn baskakov_monomial_integral(n: u32, r: u32, v: u64, m: u32, c: f64) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Domain(format!("c > 0 required, got {c}")));
    }
    let size = f64::from(n) / c - f64::from(r);
    if !(size > f64::from(m) + 1.0) {
        return Err(Error::DivergentIntegral {
            requirement: format!("n / c > r + m + 1 (n = {n}, r = {r}, m = {m}, c = {c})"),
        });
    }
    Ok(shape_monomial_integral(size, v + u64::from(r), m, c))
}
