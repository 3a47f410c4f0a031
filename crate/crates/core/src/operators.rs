//! Point evaluation of the Jain operator `G_n^mu` and the Jain-Baskakov
//! integral operators (classical, `c`-parameter and Stancu forms).
//!
//! The integral operators are evaluated as a truncated Jain series whose
//! terms are Baskakov-weighted integrals. Polynomial integrands use the
//! closed Beta-integral moments; everything else goes through semi-infinite
//! quadrature, one integral per series term.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::{check_mu, jain_series_plan, Accuracy, BaskakovKernel, Growth};
use crate::error::{Error, Result};
use crate::poly::{PiecewisePoly, Poly};
use crate::quadrature::integrate_to_infinity;
use crate::special::ln_gamma;

/// Operator family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `G_n^mu`, point evaluation at `k / n`.
    Jain,
    /// `K_n^{mu,r}` with the classical Baskakov basis.
    JainBaskakov,
    /// `K_{n,c}^{mu,r}` with the generalized Baskakov basis.
    JainBaskakovC,
    /// `K_{n,alpha,beta}^{mu,r}`: argument `(n t + alpha) / (n + beta)`.
    Stancu,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Jain => "jain",
            Family::JainBaskakov => "jain-baskakov",
            Family::JainBaskakovC => "jain-baskakov-c",
            Family::Stancu => "stancu",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jain" => Ok(Family::Jain),
            "jain-baskakov" => Ok(Family::JainBaskakov),
            "jain-baskakov-c" => Ok(Family::JainBaskakovC),
            "stancu" => Ok(Family::Stancu),
            other => Err(Error::InvalidSpec(format!(
                "family in {{jain, jain-baskakov, jain-baskakov-c, stancu}} required, got {other:?}"
            ))),
        }
    }
}

/// Family plus parameters.
///
/// `normalized` selects the constant-preserving operator
/// `(n - r c - c) sum_v omega int p f`; otherwise the operator carries its
/// defining prefactor `n^r Gamma(n/c - r) / Gamma(n/c - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub family: Family,
    pub n: u32,
    pub mu: f64,
    pub r: u32,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub normalized: bool,
}

impl OperatorSpec {
    fn base(family: Family, n: u32, r: u32, mu: f64) -> Self {
        Self {
            family,
            n,
            mu,
            r,
            c: 1.0,
            alpha: 0.0,
            beta: 0.0,
            normalized: true,
        }
    }

    pub fn jain(n: u32, mu: f64) -> Self {
        Self::base(Family::Jain, n, 0, mu)
    }

    pub fn jain_baskakov(n: u32, r: u32, mu: f64) -> Self {
        Self::base(Family::JainBaskakov, n, r, mu)
    }

    pub fn jain_baskakov_c(n: u32, r: u32, mu: f64, c: f64) -> Self {
        Self {
            c,
            ..Self::base(Family::JainBaskakovC, n, r, mu)
        }
    }

    pub fn stancu(n: u32, r: u32, mu: f64, alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            beta,
            ..Self::base(Family::Stancu, n, r, mu)
        }
    }

    /// Same operator with the defining (non-normalized) prefactor.
    pub fn raw(self) -> Self {
        Self {
            normalized: false,
            ..self
        }
    }

    pub fn with_mu(self, mu: f64) -> Self {
        Self { mu, ..self }
    }

    pub fn with_n(self, n: u32) -> Self {
        Self { n, ..self }
    }

    /// `c` as seen by the basis (1 outside the `c`-family).
    pub fn basis_c(&self) -> f64 {
        if self.family == Family::JainBaskakovC {
            self.c
        } else {
            1.0
        }
    }

    /// Gamma-argument size `n / c - r` of the inner basis `p_{n - r c, v + r}`.
    pub fn size(&self) -> f64 {
        f64::from(self.n) / self.basis_c() - f64::from(self.r)
    }

    /// `n - r c - c`, the constant-preserving factor.
    pub fn normalizer(&self) -> f64 {
        let c = self.basis_c();
        f64::from(self.n) - f64::from(self.r) * c - c
    }

    /// `n^r Gamma(n/c - r) / Gamma(n/c - 1)`; for `c = 1`,
    /// `n^r (n - r - 1)! / (n - 2)!`.
    pub fn raw_prefactor(&self) -> f64 {
        let nc = f64::from(self.n) / self.basis_c();
        (f64::from(self.r) * f64::from(self.n).ln() + ln_gamma(nc - f64::from(self.r))
            - ln_gamma(nc - 1.0))
        .exp()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidSpec("n >= 1 required".into()));
        }
        check_mu(self.mu).map_err(|_| {
            Error::InvalidSpec(format!("mu in [0, 0.99] required, got {}", self.mu))
        })?;
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "c > 0 required, got {}",
                self.c
            )));
        }
        if self.family != Family::JainBaskakovC && self.c != 1.0 {
            return Err(Error::InvalidSpec(format!(
                "c = 1 required for family {} (use jain-baskakov-c)",
                self.family
            )));
        }
        if self.family == Family::Stancu {
            if !(0.0 <= self.alpha && self.alpha <= self.beta) || !self.beta.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "0 <= alpha <= beta required, got alpha = {}, beta = {}",
                    self.alpha, self.beta
                )));
            }
        } else if self.alpha != 0.0 || self.beta != 0.0 {
            return Err(Error::InvalidSpec(format!(
                "alpha = beta = 0 required for family {}",
                self.family
            )));
        }
        if self.family != Family::Jain && !(self.size() > 1.0) {
            return Err(Error::InvalidSpec(format!(
                "n > (r + 1) c required, got n = {}, r = {}, c = {}",
                self.n, self.r, self.c
            )));
        }
        Ok(())
    }
}

type Callback = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// How the integrand is represented.
#[derive(Clone)]
pub enum IntegrandKind {
    Polynomial(Poly),
    Callback(Callback),
    Piecewise(PiecewisePoly),
}

impl fmt::Debug for IntegrandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegrandKind::Polynomial(p) => f.debug_tuple("Polynomial").field(p).finish(),
            IntegrandKind::Callback(_) => f.write_str("Callback(..)"),
            IntegrandKind::Piecewise(p) => f.debug_tuple("Piecewise").field(p).finish(),
        }
    }
}

/// A function on `[0, inf)` with envelope `|f(t)| <= M (1 + t^(2q))`.
#[derive(Debug, Clone)]
pub struct Integrand {
    kind: IntegrandKind,
    growth_degree: u32,
    growth_constant: f64,
    knots: Vec<f64>,
}

impl Integrand {
    /// Polynomial with ascending coefficients; the envelope is derived
    /// (`q = ceil(deg / 2)`, `M = sum |c_k|`).
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        let p = Poly::new(coeffs);
        let m: f64 = p.coeffs().iter().map(|c| c.abs()).sum();
        Self {
            growth_degree: (p.degree() as u32).div_ceil(2),
            growth_constant: if m > 0.0 { m } else { 1.0 },
            kind: IntegrandKind::Polynomial(p),
            knots: Vec::new(),
        }
    }

    pub fn monomial(m: usize) -> Self {
        Self::polynomial(Poly::monomial(m).coeffs().to_vec())
    }

    /// Black-box integrand; the envelope is sampled on `[0, 1e3]`.
    pub fn callback<F>(f: F, growth_degree: u32, growth_constant: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::callback_with_knots(f, growth_degree, growth_constant, Vec::new())
    }

    /// Black-box integrand with known non-smooth points.
    pub fn callback_with_knots<F>(
        f: F,
        growth_degree: u32,
        growth_constant: f64,
        knots: Vec<f64>,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let integrand = Self {
            kind: IntegrandKind::Callback(Arc::new(f)),
            growth_degree,
            growth_constant,
            knots,
        };
        integrand.check_envelope()?;
        Ok(integrand)
    }

    pub fn piecewise(f: PiecewisePoly, growth_degree: u32, growth_constant: f64) -> Result<Self> {
        let integrand = Self {
            knots: f.knots().to_vec(),
            kind: IntegrandKind::Piecewise(f),
            growth_degree,
            growth_constant,
        };
        integrand.check_envelope()?;
        Ok(integrand)
    }

    pub fn kind(&self) -> &IntegrandKind {
        &self.kind
    }

    pub fn growth_degree(&self) -> u32 {
        self.growth_degree
    }

    pub fn growth_constant(&self) -> f64 {
        self.growth_constant
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            IntegrandKind::Polynomial(p) => p.eval(t),
            IntegrandKind::Callback(f) => f(t),
            IntegrandKind::Piecewise(p) => p.eval(t),
        }
    }

    /// Sanity check of the growth envelope on a grid of `[0, 1e3]`.
    pub fn check_envelope(&self) -> Result<()> {
        if !(self.growth_constant > 0.0) {
            return Err(Error::Domain(format!(
                "growth constant M > 0 required, got {}",
                self.growth_constant
            )));
        }
        let uniform = (0..=1000).map(|i| 10.0 * f64::from(i) / 1000.0);
        let logs = (1..=1000).map(|i| 10f64.powf(1.0 + 2.0 * f64::from(i) / 1000.0));
        for t in uniform.chain(logs) {
            let value = self.eval(t).abs();
            let bound = self.growth_constant * (1.0 + t.powi(2 * self.growth_degree as i32));
            if !(value <= bound * (1.0 + 1e-12)) {
                return Err(Error::EnvelopeViolated { t, value, bound });
            }
        }
        Ok(())
    }

    /// The same function routed through the quadrature path.
    pub fn as_callback(&self) -> Integrand {
        let me = self.clone();
        Self {
            kind: IntegrandKind::Callback(Arc::new(move |t| me.eval(t))),
            growth_degree: self.growth_degree,
            growth_constant: self.growth_constant,
            knots: self.knots.clone(),
        }
    }

    /// Degree used for convergence checks and truncation growth.
    fn effective_degree(&self) -> u32 {
        match &self.kind {
            IntegrandKind::Polynomial(p) => p.degree() as u32,
            _ => 2 * self.growth_degree,
        }
    }

    /// `t -> f(a t + b)` for `0 < a <= 1`, `0 <= b < 1`.
    fn compose_affine(&self, a: f64, b: f64) -> Integrand {
        let knots = self.knots.iter().map(|&k| (k - b) / a).collect();
        let growth_constant = self.growth_constant * 2f64.powi(2 * self.growth_degree as i32);
        let kind = match &self.kind {
            IntegrandKind::Polynomial(p) => {
                let q = p.compose_affine(a, b);
                return Self {
                    growth_constant: self
                        .growth_constant
                        .max(q.coeffs().iter().map(|c| c.abs()).sum::<f64>()),
                    kind: IntegrandKind::Polynomial(q),
                    growth_degree: self.growth_degree,
                    knots: Vec::new(),
                };
            }
            IntegrandKind::Piecewise(p) => IntegrandKind::Piecewise(p.compose_affine(a, b)),
            IntegrandKind::Callback(f) => {
                let f = Arc::clone(f);
                IntegrandKind::Callback(Arc::new(move |t| f(a * t + b)))
            }
        };
        Self {
            kind,
            growth_degree: self.growth_degree,
            growth_constant,
            knots,
        }
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x >= 0 required, got {x}")));
    }
    Ok(())
}

/// `G_n^mu(f, x) = sum_k omega_mu(k, n x) f(k / n)`; `x = 0` gives `f(0)`.
pub fn eval_jain(f: &Integrand, x: f64, n: u32, mu: f64, acc: &Accuracy) -> Result<f64> {
    check_x(x)?;
    OperatorSpec::jain(n, mu).validate()?;
    let nf = f64::from(n);
    let growth = Growth::new(f.effective_degree(), 1.0 / nf);
    let plan = jain_series_plan(nf * x, mu, acc, growth)?;
    plan.sum(|k| Ok(f.eval(k as f64 / nf)))
}

/// `int_0^inf p_{shape,k}(t, c) f(t) dt` by quadrature.
pub(crate) fn basis_quadrature(
    f: &dyn Fn(f64) -> f64,
    knots: &[f64],
    shape: f64,
    k: u64,
    c: f64,
    acc: &Accuracy,
) -> Result<f64> {
    let kernel = BaskakovKernel::new(shape, k, c)?;
    let mut points = kernel.bulk_points();
    points.extend_from_slice(knots);
    let g = |t: f64| {
        let w = kernel.at(t);
        if w == 0.0 {
            0.0
        } else {
            w * f(t)
        }
    };
    integrate_to_infinity(g, 0.0, &points, acc).map(|q| q.value)
}

/// Shared evaluation of the integral families with basis parameter `c`.
fn eval_integral(f: &Integrand, x: f64, spec: &OperatorSpec, acc: &Accuracy) -> Result<f64> {
    check_x(x)?;
    let c = spec.basis_c();
    let size = spec.size();
    let shape = f64::from(spec.n) - f64::from(spec.r) * c;
    let degree = f.effective_degree();
    if !(size > f64::from(degree) + 1.0) {
        return Err(Error::DivergentIntegral {
            requirement: format!(
                "n / c > r + {} + 1 for an integrand of degree {degree} (n = {}, r = {}, c = {c})",
                degree, spec.n, spec.r
            ),
        });
    }
    let nf = f64::from(spec.n);
    let plan = jain_series_plan(nf * x, spec.mu, acc, Growth::new(degree, 1.0 / nf))?;
    let r = u64::from(spec.r);
    let sum = match &f.kind {
        IntegrandKind::Polynomial(p) => plan.sum(|v| {
            let k = (v + r) as f64;
            // I_j = I_{j-1} (k + j) / (c (size - j - 1)), I_0 = 1 / (c (size - 1))
            let mut moment = 1.0 / (c * (size - 1.0));
            let mut acc_inner = 0.0;
            for (j, &coef) in p.coeffs().iter().enumerate() {
                if j > 0 {
                    let jf = j as f64;
                    moment *= (k + jf) / (c * (size - jf - 1.0));
                }
                acc_inner += coef * moment;
            }
            Ok(acc_inner)
        })?,
        _ => {
            let eval = |t: f64| f.eval(t);
            plan.sum(|v| basis_quadrature(&eval, &f.knots, shape, v + r, c, acc))?
        }
    };
    let factor = if spec.normalized {
        spec.normalizer()
    } else {
        spec.raw_prefactor()
    };
    Ok(factor * sum)
}

fn expect_family(spec: &OperatorSpec, family: Family) -> Result<()> {
    if spec.family != family {
        return Err(Error::InvalidSpec(format!(
            "family {family} required, got {}",
            spec.family
        )));
    }
    spec.validate()
}

/// `K_n^{mu,r}(f, x)`, normalized by `n - r - 1` unless `spec.normalized`
/// is off.
pub fn eval_k(f: &Integrand, x: f64, spec: &OperatorSpec, acc: &Accuracy) -> Result<f64> {
    expect_family(spec, Family::JainBaskakov)?;
    eval_integral(f, x, spec, acc)
}

/// `K_{n,c}^{mu,r}(f, x)`, normalized by `n - r c - c` unless
/// `spec.normalized` is off.
pub fn eval_k_c(f: &Integrand, x: f64, spec: &OperatorSpec, acc: &Accuracy) -> Result<f64> {
    expect_family(spec, Family::JainBaskakovC)?;
    eval_integral(f, x, spec, acc)
}

/// `K_{n,alpha,beta}^{mu,r}(f, x)`: `eval_k` applied to
/// `t -> f((n t + alpha) / (n + beta))`.
pub fn eval_stancu(f: &Integrand, x: f64, spec: &OperatorSpec, acc: &Accuracy) -> Result<f64> {
    expect_family(spec, Family::Stancu)?;
    let nf = f64::from(spec.n);
    let scaled = if spec.alpha == 0.0 && spec.beta == 0.0 {
        f.clone()
    } else {
        f.compose_affine(nf / (nf + spec.beta), spec.alpha / (nf + spec.beta))
    };
    eval_integral(&scaled, x, spec, acc)
}

/// Evaluate any family at `x`.
pub fn evaluate(f: &Integrand, x: f64, spec: &OperatorSpec, acc: &Accuracy) -> Result<f64> {
    match spec.family {
        Family::Jain => {
            spec.validate()?;
            eval_jain(f, x, spec.n, spec.mu, acc)
        }
        Family::JainBaskakov => eval_k(f, x, spec, acc),
        Family::JainBaskakovC => eval_k_c(f, x, spec, acc),
        Family::Stancu => eval_stancu(f, x, spec, acc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn jain_moments() {
        let acc = Accuracy::default();
        let one = Integrand::polynomial(vec![1.0]);
        let t = Integrand::monomial(1);
        let t2 = Integrand::monomial(2);
        assert!((eval_jain(&one, 0.7, 12, 0.3, &acc).unwrap() - 1.0).abs() < 1e-10);
        assert!((eval_jain(&t, 1.0, 10, 0.5, &acc).unwrap() - 2.0).abs() < 1e-9);
        assert!((eval_jain(&t2, 1.0, 10, 0.5, &acc).unwrap() - 4.8).abs() < 1e-8);
        // x = 0 is the point evaluation f(0)
        let shifted = Integrand::polynomial(vec![3.0, 1.0]);
        assert_eq!(eval_jain(&shifted, 0.0, 5, 0.2, &acc).unwrap(), 3.0);
    }

    #[test]
    fn k_constants_and_first_moment() {
        let acc = Accuracy::default();
        let one = Integrand::polynomial(vec![1.0]);
        let spec = OperatorSpec::jain_baskakov(10, 2, 0.3);
        assert!((eval_k(&one, 1.5, &spec, &acc).unwrap() - 1.0).abs() < 1e-10);
        let t = Integrand::monomial(1);
        let v = eval_k(&t, 2.0, &OperatorSpec::jain_baskakov(10, 1, 0.0), &acc).unwrap();
        assert!(rel(v, 22.0 / 7.0) < 1e-10);
    }

    #[test]
    fn k_of_exponential_matches_brute_force() {
        // 500-term series, 30-digit quadrature per term (tests/oracles/gen_oracles.py)
        let acc = Accuracy::default();
        let f = Integrand::callback(|t: f64| (-t).exp(), 1, 1.0).unwrap();
        let spec = OperatorSpec::jain_baskakov(12, 0, 0.2);
        let v = eval_k(&f, 1.0, &spec, &acc).unwrap();
        assert!(rel(v, 0.262_099_688_697_454_8) < 1e-9, "got {v}");
    }

    #[test]
    fn c_family_first_moment() {
        let acc = Accuracy::default();
        let t = Integrand::monomial(1);
        let spec = OperatorSpec::jain_baskakov_c(20, 1, 0.1, 2.0);
        let v = eval_k_c(&t, 1.0, &spec, &acc).unwrap();
        assert!(rel(v, 21.8 / 12.6) < 1e-10);
        let one = Integrand::polynomial(vec![1.0]);
        assert!((eval_k_c(&one, 3.0, &spec, &acc).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn stancu_linear_decomposition() {
        let acc = Accuracy::default();
        let t = Integrand::monomial(1);
        let spec = OperatorSpec::stancu(10, 0, 0.0, 1.0, 2.0);
        let v = eval_stancu(&t, 1.5, &spec, &acc).unwrap();
        let k = OperatorSpec::jain_baskakov(10, 0, 0.0);
        let k1 = eval_k(&t, 1.5, &k, &acc).unwrap();
        let k0 = eval_k(&Integrand::polynomial(vec![1.0]), 1.5, &k, &acc).unwrap();
        assert!(rel(v, 10.0 / 12.0 * k1 + 1.0 / 12.0 * k0) < 1e-12);
        assert!(rel(v, 1.75) < 1e-12);
    }

    #[test]
    fn raw_prefactor_relation() {
        let acc = Accuracy::default();
        let t = Integrand::monomial(1);
        let spec = OperatorSpec::jain_baskakov(9, 2, 0.1);
        let norm = eval_k(&t, 0.8, &spec, &acc).unwrap();
        let raw = eval_k(&t, 0.8, &spec.raw(), &acc).unwrap();
        // n^r (n-r-1)! / (n-2)! / (n-r-1) = 81 * 720 / 5040 / 6
        let factor = 81.0 * 720.0 / 5040.0 / 6.0;
        assert!(rel(raw, norm * factor) < 1e-12);
    }

    #[test]
    fn degenerate_x_zero() {
        let acc = Accuracy::default();
        let t = Integrand::monomial(1);
        let spec = OperatorSpec::jain_baskakov(10, 1, 0.4);
        // (n-r-1) int p_{n-r,r} t = (r + 1) / (n - r - 2)
        let v = eval_k(&t, 0.0, &spec, &acc).unwrap();
        assert!(rel(v, 2.0 / 7.0) < 1e-14);
    }

    #[test]
    fn spec_validation_messages() {
        let bad_mu = OperatorSpec::jain_baskakov(10, 0, 1.5)
            .validate()
            .unwrap_err();
        assert!(bad_mu.to_string().contains("mu in [0, 0.99]"));
        let bad_stancu = OperatorSpec::stancu(10, 0, 0.0, 2.0, 1.0)
            .validate()
            .unwrap_err();
        assert!(bad_stancu.to_string().contains("alpha <= beta"));
        assert!(OperatorSpec::jain_baskakov(3, 2, 0.0).validate().is_err());
        let mut c_on_base = OperatorSpec::jain_baskakov(10, 0, 0.0);
        c_on_base.c = 2.0;
        assert!(c_on_base.validate().is_err());
        let wrong = eval_k_c(
            &Integrand::monomial(0),
            1.0,
            &OperatorSpec::jain_baskakov(10, 0, 0.0),
            &Accuracy::default(),
        );
        assert!(matches!(wrong, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn divergent_growth_is_rejected() {
        let acc = Accuracy::default();
        let t4 = Integrand::monomial(4);
        let res = eval_k(&t4, 1.0, &OperatorSpec::jain_baskakov(5, 0, 0.0), &acc);
        assert!(matches!(res, Err(Error::DivergentIntegral { .. })));
    }

    #[test]
    fn envelope_violation_detected() {
        let res = Integrand::callback(|t: f64| t.powi(3), 1, 1.0);
        assert!(matches!(res, Err(Error::EnvelopeViolated { .. })));
    }
}
