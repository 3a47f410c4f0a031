//! Rate of approximation for functions with a derivative of bounded
//! variation.
//!
//! Test functions are piecewise polynomials, so every quantity in the bound
//! (one-sided derivatives, total variations, growth constants) is computed
//! exactly from the pieces. The bound is assembled term by term and compared
//! with the measured error of the normalized operator.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::Accuracy;
use crate::error::{Error, Result};
use crate::moments::{closed_central_moment, estimate_sandwich_c, numeric_moment};
use crate::operators::{evaluate, Family, Integrand, OperatorSpec};
use crate::poly::{PiecewisePoly, Poly};

/// Relative slack allowed when checking continuity and envelopes.
const SLACK: f64 = 1e-12;

/// Serializable description of a test function: `(breakpoint, coefficients)`
/// pairs with coefficients in the local coordinate `t - breakpoint`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionDef {
    pub name: String,
    pub pieces: Vec<(f64, Vec<f64>)>,
    pub q: u32,
    pub m: f64,
    pub t0: f64,
}

/// A continuous piecewise polynomial on `[0, inf)` with a declared envelope
/// `|f(t)| <= M t^(2q)` for `t >= t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    name: String,
    f: PiecewisePoly,
    df: PiecewisePoly,
    q: u32,
    m: f64,
    t0: f64,
}

/// `p(t - knot)` as a polynomial in `t`.
fn global_piece(f: &PiecewisePoly, i: usize) -> Poly {
    f.pieces()[i].compose_affine(1.0, -f.knots()[i])
}

/// `sup |p(t)| / w(t)` over `[lo, hi]`, `w > 0` there; `hi` may be infinite.
fn sup_ratio(p: &Poly, w: &Poly, lo: f64, hi: f64) -> f64 {
    let ratio = |t: f64| p.eval(t).abs() / w.eval(t);
    let mut best = ratio(lo);
    if hi.is_finite() {
        best = best.max(ratio(hi));
    } else if !p.is_zero() {
        let (dp, dw) = (p.degree(), w.degree());
        if dp > dw {
            return f64::INFINITY;
        }
        if dp == dw {
            best = best.max((p.coeffs()[dp] / w.coeffs()[dw]).abs());
        }
    }
    let critical = p
        .derivative()
        .mul(w)
        .add(&p.mul(&w.derivative()).scale(-1.0));
    if critical.is_zero() {
        return best;
    }
    let upper = if hi.is_finite() {
        hi
    } else {
        critical.root_bound().max(lo) + 1.0
    };
    for t in critical.real_roots_in(lo, upper) {
        best = best.max(ratio(t));
    }
    best
}

/// `sup_{t >= lo} |f(t)| / w(t)`.
fn sup_ratio_from(f: &PiecewisePoly, w: &Poly, lo: f64) -> f64 {
    (0..f.pieces().len())
        .filter_map(|i| {
            let (a, b) = f.piece_range(i);
            let a = if i == 0 { f64::NEG_INFINITY } else { a };
            (b > lo).then(|| sup_ratio(&global_piece(f, i), w, a.max(lo), b))
        })
        .fold(0.0, f64::max)
}

impl TestFunction {
    pub fn new(name: &str, f: PiecewisePoly, q: u32, m: f64, t0: f64) -> Result<Self> {
        if f.knots()[0] != 0.0 {
            return Err(Error::Domain("test functions start at t = 0".into()));
        }
        let scale = (0..f.pieces().len())
            .map(|i| f.eval(f.piece_range(i).0).abs())
            .fold(1.0, f64::max);
        let jump = f.max_jump();
        if jump > SLACK * scale {
            return Err(Error::Domain(format!(
                "test function must be continuous, found a jump of {jump}"
            )));
        }
        if !(m > 0.0) || !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::Domain(format!(
                "envelope needs M > 0 and a finite t0 > 0, got M = {m}, t0 = {t0}"
            )));
        }
        let df = f.derivative();
        let tf = Self {
            name: name.to_string(),
            f,
            df,
            q,
            m,
            t0,
        };
        let sup = tf.envelope_constant_from(t0);
        if !(sup <= m * (1.0 + SLACK)) {
            return Err(Error::EnvelopeViolated {
                t: t0,
                value: sup,
                bound: m,
            });
        }
        Ok(tf)
    }

    /// Envelope read off the function itself: `q = ceil(deg / 2)` of the last
    /// piece, `t0 = 1`, and `M` the exact supremum from `t0`.
    pub fn with_derived_envelope(name: &str, f: PiecewisePoly) -> Result<Self> {
        let last = f.pieces().last().expect("nonempty").degree() as u32;
        let q = last.div_ceil(2).max(1);
        let probe = Self {
            name: name.to_string(),
            df: f.derivative(),
            f: f.clone(),
            q,
            m: 1.0,
            t0: 1.0,
        };
        let m = probe.envelope_constant_from(1.0);
        Self::new(
            name,
            f,
            q,
            if m > 0.0 { m * (1.0 + SLACK) } else { 1.0 },
            1.0,
        )
    }

    pub fn from_def(def: &TestFunctionDef) -> Result<Self> {
        let (knots, pieces) = def
            .pieces
            .iter()
            .map(|(k, c)| (*k, Poly::new(c.clone())))
            .unzip();
        Self::new(
            &def.name,
            PiecewisePoly::new(knots, pieces)?,
            def.q,
            def.m,
            def.t0,
        )
    }

    pub fn to_def(&self) -> TestFunctionDef {
        TestFunctionDef {
            name: self.name.clone(),
            pieces: self
                .f
                .knots()
                .iter()
                .zip(self.f.pieces())
                .map(|(&k, p)| (k, p.coeffs().to_vec()))
                .collect(),
            q: self.q,
            m: self.m,
            t0: self.t0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn function(&self) -> &PiecewisePoly {
        &self.f
    }

    pub fn derivative(&self) -> &PiecewisePoly {
        &self.df
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn envelope_m(&self) -> f64 {
        self.m
    }

    pub fn envelope_t0(&self) -> f64 {
        self.t0
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.f.eval(t)
    }

    /// `f'(x+)`.
    pub fn deriv_right(&self, x: f64) -> f64 {
        self.df.eval(x)
    }

    /// `f'(x-)`.
    pub fn deriv_left(&self, x: f64) -> f64 {
        self.df.left_limit(x)
    }

    /// Exact `sup_{t >= lo} |f(t)| / t^(2q)`, `lo > 0`.
    pub fn envelope_constant_from(&self, lo: f64) -> f64 {
        sup_ratio_from(&self.f, &Poly::monomial(2 * self.q as usize), lo)
    }

    /// The function as an operator integrand with a global envelope
    /// `|f(t)| <= M (1 + t^(2q))`.
    pub fn integrand(&self) -> Result<Integrand> {
        if self.f.pieces().len() == 1 {
            return Ok(Integrand::polynomial(self.f.pieces()[0].coeffs().to_vec()));
        }
        let w = Poly::monomial(2 * self.q as usize).add_constant(1.0);
        let m = sup_ratio_from(&self.f, &w, 0.0);
        Integrand::piecewise(
            self.f.clone(),
            self.q,
            if m > 0.0 { m * (1.0 + 1e-9) } else { 1.0 },
        )
    }
}

fn from_local(name: &str, pieces: &[(f64, &[f64])], q: u32, m: f64) -> TestFunction {
    let (knots, polys) = pieces
        .iter()
        .map(|(k, c)| (*k, Poly::new(c.to_vec())))
        .unzip();
    TestFunction::new(
        name,
        PiecewisePoly::new(knots, polys).expect("valid knots"),
        q,
        m,
        1.0,
    )
    .expect("corpus functions satisfy their envelopes")
}

fn exp_spline() -> TestFunction {
    let h = 0.25;
    let mut knots = Vec::new();
    let mut pieces = Vec::new();
    for i in 0..32 {
        let t = h * f64::from(i);
        let (y0, y1) = ((-t).exp(), (-(t + h)).exp());
        let (d0, d1) = (-y0, -y1);
        let slope = (y1 - y0) / h;
        let c2 = (3.0 * slope - 2.0 * d0 - d1) / h;
        let c3 = (d0 + d1 - 2.0 * slope) / (h * h);
        knots.push(t);
        pieces.push(Poly::new(vec![y0, d0, c2, c3]));
    }
    knots.push(8.0);
    pieces.push(Poly::constant((-8.0f64).exp()));
    TestFunction::new(
        "exp-spline",
        PiecewisePoly::new(knots, pieces).expect("valid knots"),
        1,
        1.0,
        1.0,
    )
    .expect("spline satisfies its envelope")
}

fn humps() -> TestFunction {
    let df = PiecewisePoly::new(
        vec![0.0, 0.5, 1.0, 1.5, 2.5],
        vec![
            Poly::constant(0.2),
            Poly::new(vec![0.2, 4.0, -8.0]),
            Poly::constant(0.2),
            Poly::new(vec![0.2, -2.0, 2.0]),
            Poly::constant(0.2),
        ],
    )
    .expect("valid knots");
    TestFunction::new("humps", df.antiderivative(1.0), 1, 1.5, 1.0)
        .expect("humps satisfies its envelope")
}

/// Names accepted by [`corpus_function`].
pub const CORPUS: [&str; 5] = ["cubic", "kink", "humps", "exp-spline", "zigzag"];

/// One member of the built-in test corpus.
pub fn corpus_function(name: &str) -> Result<TestFunction> {
    Ok(match name {
        // 1 - t + t^3 / 3
        "cubic" => from_local("cubic", &[(0.0, &[1.0, -1.0, 0.0, 1.0 / 3.0])], 2, 1.0),
        // |t - 1| + t
        "kink" => from_local("kink", &[(0.0, &[1.0]), (1.0, &[1.0, 2.0])], 1, 1.0),
        "humps" => humps(),
        "exp-spline" => exp_spline(),
        "zigzag" => from_local(
            "zigzag",
            &[
                (0.0, &[1.0, -1.0]),
                (0.5, &[0.5, 0.0, 1.0]),
                (2.0, &[2.75, -0.5]),
            ],
            1,
            1.0,
        ),
        other => {
            return Err(Error::InvalidSpec(format!(
                "unknown corpus function {other:?}, expected one of {}",
                CORPUS.join(", ")
            )))
        }
    })
}

/// The whole corpus in a fixed order.
pub fn corpus() -> Vec<TestFunction> {
    CORPUS
        .iter()
        .map(|name| corpus_function(name).expect("corpus names are valid"))
        .collect()
}

/// `g_x`: `g(t) - g(x-)` left of `x`, `0` at `x`, `g(t) - g(x+)` right of it.
pub fn fx_transform(g: &PiecewisePoly, x: f64) -> Result<PiecewisePoly> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x > 0 required, got {x}")));
    }
    let left = g.left_limit(x);
    let right = g.eval(x);
    let split = g.with_knot(x);
    Ok(split.map_pieces(|i, p| {
        let offset = if split.knots()[i] < x { left } else { right };
        p.add_constant(-offset)
    }))
}

/// Exact total variation of `g` on `[a, b]`, including jumps at knots in
/// `(a, b]`.
pub fn total_variation(g: &PiecewisePoly, a: f64, b: f64) -> Result<f64> {
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "finite a <= b required, got [{a}, {b}]"
        )));
    }
    let mut tv = 0.0;
    for (i, p) in g.pieces().iter().enumerate() {
        let (s, e) = g.piece_range(i);
        let s = if i == 0 { f64::NEG_INFINITY } else { s };
        let (lo, hi) = (s.max(a), e.min(b));
        if lo >= hi {
            continue;
        }
        let k = g.knots()[i];
        let mut points = vec![lo - k];
        points.extend(p.derivative().real_roots_in(lo - k, hi - k));
        points.push(hi - k);
        tv += points
            .windows(2)
            .map(|w| (p.eval(w[1]) - p.eval(w[0])).abs())
            .sum::<f64>();
    }
    tv += g
        .knots()
        .iter()
        .skip(1)
        .filter(|&&k| a < k && k <= b)
        .map(|&k| (g.eval(k) - g.left_limit(k)).abs())
        .sum::<f64>();
    Ok(tv)
}

/// Itemized right-hand side of the rate bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTerms {
    /// `(Cx/n) (sum_k V_{x-x/k}^{x+x/k} + (x/sqrt n) V_{x-x/sqrt n}^{x+x/sqrt n})` of `(f')_x`.
    pub tv: f64,
    /// `sqrt(C x^2 / n) |f'(x+) - f'(x-)| / 2`.
    pub jump: f64,
    /// `|f'(x+) + f'(x-)| T_1 / 2`.
    pub mean: f64,
    /// `(C/n)(|f(2x) - f(x) - x f'(x+)| + |f(x)|) + |f'(x+)| C x / n`.
    pub f2x: f64,
    /// `M_x 2^(2q) T_(2q)` with `M_x = sup_{t >= 2x} |f(t)| / t^(2q)`.
    pub tail: f64,
}

impl BoundTerms {
    pub fn total(&self) -> f64 {
        self.tv + self.jump + self.mean + self.f2x + self.tail
    }
}

/// One `(n, x)` row of a bound experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: u32,
    pub x: f64,
    pub measured_error: f64,
    pub bound_total: f64,
    pub terms: BoundTerms,
}

impl BoundRow {
    pub fn dominated(&self) -> bool {
        self.measured_error <= self.bound_total
    }
}

/// The right-hand side at `(x, spec.n)` for sandwich constant `c_const`.
pub fn bound_terms(
    f: &TestFunction,
    x: f64,
    spec: &OperatorSpec,
    c_const: f64,
    acc: &Accuracy,
) -> Result<BoundTerms> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x > 0 required, got {x}")));
    }
    if !(c_const > 1.0) {
        return Err(Error::Domain(format!(
            "sandwich constant C > 1 required, got {c_const}"
        )));
    }
    let n = spec.n;
    let nf = f64::from(n);
    let q = f.q();
    let c = spec.basis_c();
    let needed = f64::from(spec.r + 2 * q.max(1) + 1) * c;
    if !(nf > needed) {
        return Err(Error::InsufficientN {
            requirement: format!("n > (r + 2q + 1) c = {needed} for the tail moment, got n = {n}"),
        });
    }
    let dfx = fx_transform(f.derivative(), x)?;
    let sqrt_n = nf.sqrt();
    let mut v_sum = 0.0;
    for k in 1..=(sqrt_n.floor() as u32) {
        let h = x / f64::from(k);
        v_sum += total_variation(&dfx, x - h, x + h)?;
    }
    let h = x / sqrt_n;
    let v_last = total_variation(&dfx, x - h, x + h)?;
    let cx_n = c_const * x / nf;
    let tv = cx_n * (v_sum + h * v_last);

    let (dr, dl) = (f.deriv_right(x), f.deriv_left(x));
    let fx = f.eval(x);
    let jump = 0.5 * (c_const * x * x / nf).sqrt() * (dr - dl).abs();
    let t1 = closed_central_moment(1, x, spec)?;
    let mean = 0.5 * (dr + dl).abs() * t1.abs();
    let f2x = c_const / nf * ((f.eval(2.0 * x) - fx - x * dr).abs() + fx.abs()) + dr.abs() * cx_n;
    let m_x = f.envelope_constant_from(2.0 * x);
    let t2q = numeric_moment(2 * q, x, spec, acc, true)?;
    let tail = m_x * 4f64.powi(q as i32) * t2q;
    Ok(BoundTerms {
        tv,
        jump,
        mean,
        f2x,
        tail,
    })
}

fn bound_row(
    f: &TestFunction,
    x: f64,
    spec: &OperatorSpec,
    c_const: f64,
    acc: &Accuracy,
) -> Result<BoundRow> {
    let terms = bound_terms(f, x, spec, c_const, acc)?;
    let value = evaluate(&f.integrand()?, x, spec, acc)?;
    Ok(BoundRow {
        n: spec.n,
        x,
        measured_error: (value - f.eval(x)).abs(),
        bound_total: terms.total(),
        terms,
    })
}

/// Measured error and bound for the `c = 1` operator.
pub fn theorem1_bound(
    f: &TestFunction,
    x: f64,
    n: u32,
    spec: &OperatorSpec,
    c_const: f64,
    acc: &Accuracy,
) -> Result<BoundRow> {
    if spec.family != Family::JainBaskakov {
        return Err(Error::InvalidSpec(format!(
            "family jain-baskakov required, got {}",
            spec.family
        )));
    }
    let spec = spec.with_n(n);
    spec.validate()?;
    bound_row(f, x, &spec, c_const, acc)
}

/// Measured error and bound for the operator with basis parameter `c`.
pub fn theorem3_bound(
    f: &TestFunction,
    x: f64,
    n: u32,
    spec: &OperatorSpec,
    c1: f64,
    acc: &Accuracy,
) -> Result<BoundRow> {
    if spec.family != Family::JainBaskakovC {
        return Err(Error::InvalidSpec(format!(
            "family jain-baskakov-c required, got {}",
            spec.family
        )));
    }
    let spec = spec.with_n(n);
    spec.validate()?;
    bound_row(f, x, &spec, c1, acc)
}

/// Outcome of a bound experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundExperiment {
    /// Sandwich constant used for every row.
    pub sandwich_c: f64,
    pub rows: Vec<BoundRow>,
}

impl BoundExperiment {
    pub fn all_dominated(&self) -> bool {
        self.rows.iter().all(BoundRow::dominated)
    }
}

/// Bound experiment over `n_grid x x_grid`; the sandwich constant is
/// estimated on the same grids with `mu` in `[0, spec.mu]`.
pub fn error_vs_bound(
    f: &TestFunction,
    x_grid: &[f64],
    n_grid: &[u32],
    spec: &OperatorSpec,
    acc: &Accuracy,
) -> Result<BoundExperiment> {
    let c = spec.basis_c();
    let est = estimate_sandwich_c(spec.r, spec.mu, n_grid, x_grid, c)?;
    error_vs_bound_with(f, x_grid, n_grid, spec, est.constant, acc)
}

/// Bound experiment with a given sandwich constant. Rows are sorted by
/// `(n, x)`.
pub fn error_vs_bound_with(
    f: &TestFunction,
    x_grid: &[f64],
    n_grid: &[u32],
    spec: &OperatorSpec,
    c_const: f64,
    acc: &Accuracy,
) -> Result<BoundExperiment> {
    let mut points: Vec<(u32, f64)> = n_grid
        .iter()
        .flat_map(|&n| x_grid.iter().map(move |&x| (n, x)))
        .collect();
    points.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    points.dedup();
    let rows = points
        .par_iter()
        .map(|&(n, x)| match spec.family {
            Family::JainBaskakov => theorem1_bound(f, x, n, spec, c_const, acc),
            Family::JainBaskakovC => theorem3_bound(f, x, n, spec, c_const, acc),
            other => Err(Error::InvalidSpec(format!(
                "bound experiments need jain-baskakov or jain-baskakov-c, got {other}"
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundExperiment {
        sandwich_c: c_const,
        rows,
    })
}

/// How `mu` depends on `n` in a convergence experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuRule {
    /// `mu_n = n^(-1/2)`.
    InvSqrt,
    Constant(f64),
}

impl MuRule {
    pub fn mu(&self, n: u32) -> f64 {
        match self {
            MuRule::InvSqrt => 1.0 / f64::from(n).sqrt(),
            MuRule::Constant(mu) => *mu,
        }
    }
}

impl fmt::Display for MuRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuRule::InvSqrt => f.write_str("inv-sqrt"),
            MuRule::Constant(mu) => write!(f, "const:{mu}"),
        }
    }
}

impl FromStr for MuRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "inv-sqrt" {
            return Ok(MuRule::InvSqrt);
        }
        s.strip_prefix("const:")
            .and_then(|v| v.parse::<f64>().ok())
            .map(MuRule::Constant)
            .ok_or_else(|| {
                Error::InvalidSpec(format!("mu rule must be inv-sqrt or const:<v>, got {s:?}"))
            })
    }
}

/// Sup-errors `sup_E |K(t^m, x) - x^m|` for `m = 0, 1, 2` at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KorovkinRow {
    pub n: u32,
    pub mu: f64,
    pub sup_err_m0: f64,
    pub sup_err_m1: f64,
    pub sup_err_m2: f64,
}

impl KorovkinRow {
    pub fn errors(&self) -> [f64; 3] {
        [self.sup_err_m0, self.sup_err_m1, self.sup_err_m2]
    }
}

/// Test-monomial sup-errors over a 101-point mesh of `E = [e.0, e.1]`.
pub fn korovkin_check(
    family: Family,
    r: u32,
    c: f64,
    rule: MuRule,
    e: (f64, f64),
    n_grid: &[u32],
    acc: &Accuracy,
) -> Result<Vec<KorovkinRow>> {
    let (lo, hi) = e;
    if !(0.0 <= lo && lo <= hi) || !hi.is_finite() {
        return Err(Error::Domain(format!(
            "compact E = [a, b] with 0 <= a <= b required, got [{lo}, {hi}]"
        )));
    }
    let mesh: Vec<f64> = (0..=100)
        .map(|i| lo + (hi - lo) * f64::from(i) / 100.0)
        .collect();
    let monomials: Vec<Integrand> = (0..3).map(Integrand::monomial).collect();
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let mu = rule.mu(n);
        let spec = match family {
            Family::Jain => OperatorSpec::jain(n, mu),
            Family::JainBaskakov if c == 1.0 => OperatorSpec::jain_baskakov(n, r, mu),
            Family::JainBaskakov => {
                return Err(Error::InvalidSpec(format!(
                    "c = 1 required for family jain-baskakov, got c = {c}"
                )))
            }
            Family::JainBaskakovC => OperatorSpec::jain_baskakov_c(n, r, mu, c),
            Family::Stancu => OperatorSpec::stancu(n, r, mu, 0.0, 0.0),
        };
        spec.validate()?;
        let per_x = mesh
            .par_iter()
            .map(|&x| {
                let mut errs = [0.0; 3];
                for (m, f) in monomials.iter().enumerate() {
                    errs[m] = (evaluate(f, x, &spec, acc)? - x.powi(m as i32)).abs();
                }
                Ok(errs)
            })
            .collect::<Result<Vec<_>>>()?;
        let sup = per_x.iter().fold([0.0f64; 3], |a, e| {
            [a[0].max(e[0]), a[1].max(e[1]), a[2].max(e[2])]
        });
        rows.push(KorovkinRow {
            n,
            mu,
            sup_err_m0: sup[0],
            sup_err_m1: sup[1],
            sup_err_m2: sup[2],
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(pieces: &[(f64, &[f64])]) -> PiecewisePoly {
        let (k, p) = pieces
            .iter()
            .map(|(k, c)| (*k, Poly::new(c.to_vec())))
            .unzip();
        PiecewisePoly::new(k, p).unwrap()
    }

    #[test]
    fn corpus_builds_and_is_continuous() {
        for f in corpus() {
            assert!(f.function().max_jump() < 1e-12, "{}", f.name());
            f.integrand().unwrap();
            let def = f.to_def();
            assert_eq!(TestFunction::from_def(&def).unwrap(), f);
        }
        assert!(corpus_function("nope").is_err());
    }

    #[test]
    fn humps_values() {
        let f = corpus_function("humps").unwrap();
        // f(1) = 1 + 0.2 + int_0^0.5 8 s (0.5 - s) ds
        assert!((f.eval(1.0) - (1.2 + 1.0 / 6.0)).abs() < 1e-14);
        assert!((f.deriv_right(0.75) - (0.2 + 8.0 * 0.25 * 0.25)).abs() < 1e-14);
    }

    #[test]
    fn fx_of_kink_vanishes() {
        let f = corpus_function("kink").unwrap();
        let g = fx_transform(f.derivative(), 1.0).unwrap();
        for t in [0.0, 0.3, 0.999, 1.0, 1.5, 7.0] {
            assert_eq!(g.eval(t), 0.0);
        }
        assert_eq!(total_variation(&g, 0.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn fx_of_smooth_derivative() {
        let df = pp(&[(0.0, &[0.0, 2.0])]);
        let g = fx_transform(&df, 2.0).unwrap();
        for t in [0.0, 1.0, 2.0, 3.5] {
            assert!((g.eval(t) - (2.0 * t - 4.0)).abs() < 1e-15);
        }
        assert!((total_variation(&g, 1.0, 3.0).unwrap() - 4.0).abs() < 1e-15);
        assert!(total_variation(&g, 3.0, 1.0).is_err());
        assert!(fx_transform(&df, 0.0).is_err());
    }

    #[test]
    fn zigzag_one_sided_derivatives() {
        let f = corpus_function("zigzag").unwrap();
        assert_eq!(f.deriv_left(0.5), -1.0);
        assert_eq!(f.deriv_right(0.5), 0.0);
        assert_eq!(f.deriv_left(2.0), 3.0);
        assert_eq!(f.deriv_right(2.0), -0.5);
        let g = fx_transform(f.derivative(), 2.0).unwrap();
        assert_eq!(g.eval(2.0), 0.0);
        assert!(g.left_limit(2.0).abs() < 1e-15);
    }

    #[test]
    fn envelope_constants() {
        let f = corpus_function("cubic").unwrap();
        // sup_{t >= 2} |1 - t + t^3/3| / t^4 is attained at t = 2
        assert!((f.envelope_constant_from(2.0) - (1.0 - 2.0 + 8.0 / 3.0) / 16.0).abs() < 1e-15);
        let bad = pp(&[(0.0, &[0.0, 0.0, 0.0, 1.0])]);
        assert!(matches!(
            TestFunction::new("t3", bad, 1, 1.0, 1.0),
            Err(Error::EnvelopeViolated { .. })
        ));
        let jumpy = pp(&[(0.0, &[0.0]), (1.0, &[1.0])]);
        assert!(TestFunction::new("step", jumpy, 1, 1.0, 1.0).is_err());
    }

    #[test]
    fn identity_bound_reduces() {
        let f = TestFunction::new("t", pp(&[(0.0, &[0.0, 1.0])]), 1, 1.0, 1.0).unwrap();
        let acc = Accuracy::default();
        let spec = OperatorSpec::jain_baskakov(100, 0, 0.0);
        let (x, c) = (1.5, 3.0);
        let t = bound_terms(&f, x, &spec, c, &acc).unwrap();
        assert_eq!(t.tv, 0.0);
        assert_eq!(t.jump, 0.0);
        assert!((t.f2x - (c / 100.0 * x + c * x / 100.0)).abs() < 1e-15);
        assert!((t.mean - closed_central_moment(1, x, &spec).unwrap()).abs() < 1e-15);
        let row = theorem1_bound(&f, x, 100, &spec, c, &acc).unwrap();
        assert_eq!(row.bound_total, row.terms.total());
        assert!(row.dominated());
    }

    #[test]
    fn mu_rule_parse() {
        assert_eq!("inv-sqrt".parse::<MuRule>().unwrap(), MuRule::InvSqrt);
        assert_eq!(
            "const:0.3".parse::<MuRule>().unwrap(),
            MuRule::Constant(0.3)
        );
        assert!("sqrt".parse::<MuRule>().is_err());
        assert_eq!(MuRule::Constant(0.3).to_string(), "const:0.3");
    }
}
