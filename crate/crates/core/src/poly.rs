//! Dense polynomials and right-continuous piecewise polynomials on `[0, inf)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polynomial with coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `t^m`.
    pub fn monomial(m: usize) -> Self {
        let mut coeffs = vec![0.0; m + 1];
        coeffs[m] = 1.0;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::constant(0.0);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero, plus `c0`.
    pub fn antiderivative(&self, c0: f64) -> Poly {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(c0);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k as f64 + 1.0)),
        );
        Poly::new(coeffs)
    }

    pub fn add_constant(&self, c: f64) -> Poly {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += c;
        Poly::new(coeffs)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..len)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(0.0)
                        + other.coeffs.get(k).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// `t -> p(a t + b)`.
    pub fn compose_affine(&self, a: f64, b: f64) -> Poly {
        let lin = Poly::new(vec![b, a]);
        let mut out = Poly::constant(0.0);
        for &c in self.coeffs.iter().rev() {
            out = out.mul(&lin).add_constant(c);
        }
        out
    }

    /// Re-expand around a new origin: `s -> p(s + shift)`.
    pub fn shift(&self, shift: f64) -> Poly {
        self.compose_affine(1.0, shift)
    }

    /// Upper bound on the modulus of every root (Cauchy).
    pub fn root_bound(&self) -> f64 {
        let lead = self.coeffs[self.degree()];
        if lead == 0.0 {
            return 0.0;
        }
        1.0 + self.coeffs[..self.degree()]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max)
    }

    /// Real roots strictly inside `(lo, hi)`, ascending.
    ///
    /// Roots of the derivative split the interval into monotone runs, each of
    /// which holds at most one root; those are located by bisection.
    pub fn real_roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if !(lo < hi) || self.is_zero() {
            return Vec::new();
        }
        match self.degree() {
            0 => Vec::new(),
            1 => {
                let r = -self.coeffs[0] / self.coeffs[1];
                if r > lo && r < hi {
                    vec![r]
                } else {
                    Vec::new()
                }
            }
            _ => {
                let mut points = vec![lo];
                points.extend(self.derivative().real_roots_in(lo, hi));
                points.push(hi);
                let mut roots = Vec::new();
                for w in points.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    let (fa, fb) = (self.eval(a), self.eval(b));
                    if fb == 0.0 && b < hi {
                        roots.push(b);
                    } else if fa * fb < 0.0 {
                        roots.push(self.bisect(a, b, fa));
                    }
                }
                roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + x.abs()));
                roots
            }
        }
    }

    fn bisect(&self, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = self.eval(m);
            if fm == 0.0 {
                return m;
            }
            if fa * fm < 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        0.5 * (a + b)
    }
}

/// Right-continuous piecewise polynomial.
///
/// Piece `i` covers `[knots[i], knots[i + 1])` and is stored in the local
/// coordinate `s = t - knots[i]`; the last piece extends to infinity. Points
/// left of the first knot evaluate the first piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePoly {
    knots: Vec<f64>,
    pieces: Vec<Poly>,
}

impl PiecewisePoly {
    pub fn new(knots: Vec<f64>, pieces: Vec<Poly>) -> Result<Self> {
        if knots.is_empty() || knots.len() != pieces.len() {
            return Err(Error::Domain(format!(
                "piecewise polynomial needs one knot per piece (got {} knots, {} pieces)",
                knots.len(),
                pieces.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) || knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "piecewise knots must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self { knots, pieces })
    }

    /// A single global polynomial viewed as a one-piece function from 0.
    pub fn from_poly(p: Poly) -> Self {
        Self {
            knots: vec![0.0],
            pieces: vec![p],
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    /// `[lo, hi)` of piece `i` (`hi = inf` for the last).
    pub fn piece_range(&self, i: usize) -> (f64, f64) {
        let hi = self.knots.get(i + 1).copied().unwrap_or(f64::INFINITY);
        (self.knots[i], hi)
    }

    fn piece_index(&self, t: f64) -> usize {
        self.knots.partition_point(|&k| k <= t).saturating_sub(1)
    }

    fn piece_index_left(&self, t: f64) -> usize {
        self.knots.partition_point(|&k| k < t).saturating_sub(1)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.piece_index(t);
        self.pieces[i].eval(t - self.knots[i])
    }

    /// `g(t-)`.
    pub fn left_limit(&self, t: f64) -> f64 {
        let i = self.piece_index_left(t);
        self.pieces[i].eval(t - self.knots[i])
    }

    pub fn derivative(&self) -> PiecewisePoly {
        Self {
            knots: self.knots.clone(),
            pieces: self.pieces.iter().map(Poly::derivative).collect(),
        }
    }

    /// Continuous antiderivative with value `start` at the first knot.
    pub fn antiderivative(&self, start: f64) -> PiecewisePoly {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut value = start;
        for (i, p) in self.pieces.iter().enumerate() {
            let anti = p.antiderivative(value);
            if let Some(&next) = self.knots.get(i + 1) {
                value = anti.eval(next - self.knots[i]);
            }
            pieces.push(anti);
        }
        Self {
            knots: self.knots.clone(),
            pieces,
        }
    }

    /// Largest jump `|g(k) - g(k-)|` over interior knots.
    pub fn max_jump(&self) -> f64 {
        self.knots
            .iter()
            .skip(1)
            .map(|&k| (self.eval(k) - self.left_limit(k)).abs())
            .fold(0.0, f64::max)
    }

    /// Ensure `x` is a knot, splitting the piece that contains it.
    pub fn with_knot(&self, x: f64) -> PiecewisePoly {
        if self.knots.contains(&x) || x < self.knots[0] {
            return self.clone();
        }
        let i = self.piece_index(x);
        let mut knots = self.knots.clone();
        let mut pieces = self.pieces.clone();
        let shifted = self.pieces[i].shift(x - self.knots[i]);
        knots.insert(i + 1, x);
        pieces.insert(i + 1, shifted);
        Self { knots, pieces }
    }

    /// Compose with an increasing affine map: `t -> g(a t + b)`, `a > 0`.
    pub fn compose_affine(&self, a: f64, b: f64) -> PiecewisePoly {
        let knots: Vec<f64> = self.knots.iter().map(|&k| (k - b) / a).collect();
        // local coordinates scale: t - new_k maps to a (t - new_k)
        let pieces = self
            .pieces
            .iter()
            .map(|p| p.compose_affine(a, 0.0))
            .collect();
        Self { knots, pieces }
    }

    /// Apply `f` to every piece (same knots).
    pub fn map_pieces(&self, f: impl Fn(usize, &Poly) -> Poly) -> PiecewisePoly {
        Self {
            knots: self.knots.clone(),
            pieces: self
                .pieces
                .iter()
                .enumerate()
                .map(|(i, p)| f(i, p))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_and_derivative() {
        let p = Poly::new(vec![1.0, -3.0, 0.0, 2.0]);
        assert_eq!(p.eval(2.0), 1.0 - 6.0 + 16.0);
        assert_eq!(p.derivative().coeffs(), &[-3.0, 0.0, 6.0]);
        assert_eq!(Poly::new(vec![1.0, 0.0, 0.0]).degree(), 0);
    }

    #[test]
    fn compose_affine_matches_pointwise() {
        let p = Poly::new(vec![0.5, -1.0, 2.0, 0.25]);
        let q = p.compose_affine(10.0 / 12.0, 1.0 / 12.0);
        for &t in &[0.0, 0.3, 1.7, 5.0] {
            let direct = p.eval(10.0 / 12.0 * t + 1.0 / 12.0);
            assert!((q.eval(t) - direct).abs() < 1e-12 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn roots_of_cubic() {
        // (t - 0.5)(t - 1)(t - 2)
        let p = Poly::new(vec![-1.0, 3.5, -3.5, 1.0]);
        let roots = p.real_roots_in(0.0, 3.0);
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip([0.5, 1.0, 2.0]) {
            assert!((r - e).abs() < 1e-12);
        }
        assert!(p.real_roots_in(2.5, 3.0).is_empty());
        assert!(p.root_bound() >= 2.0);
    }

    #[test]
    fn piecewise_eval_and_limits() {
        let g = PiecewisePoly::new(
            vec![0.0, 1.0],
            vec![Poly::new(vec![1.0]), Poly::new(vec![1.0, 2.0])],
        )
        .unwrap();
        assert_eq!(g.eval(0.5), 1.0);
        assert_eq!(g.eval(1.0), 1.0);
        assert_eq!(g.eval(2.0), 3.0);
        let d = g.derivative();
        assert_eq!(d.eval(1.0), 2.0);
        assert_eq!(d.left_limit(1.0), 0.0);
        assert_eq!(d.max_jump(), 2.0);
    }

    #[test]
    fn antiderivative_is_continuous() {
        let d = PiecewisePoly::new(
            vec![0.0, 0.5, 1.0],
            vec![
                Poly::constant(0.2),
                Poly::new(vec![0.2, 4.0, -8.0]),
                Poly::constant(0.2),
            ],
        )
        .unwrap();
        let f = d.antiderivative(1.0);
        for &k in &[0.5, 1.0] {
            assert!((f.eval(k) - f.left_limit(k)).abs() < 1e-15);
        }
        assert!((f.eval(0.5) - 1.1).abs() < 1e-15);
    }

    #[test]
    fn split_and_compose_preserve_values() {
        let g = PiecewisePoly::new(
            vec![0.0, 1.0],
            vec![Poly::new(vec![0.0, 1.0, 1.0]), Poly::new(vec![2.0, -1.0])],
        )
        .unwrap();
        let h = g.with_knot(0.4);
        assert_eq!(h.knots(), &[0.0, 0.4, 1.0]);
        let c = g.compose_affine(0.8, 0.1);
        for &t in &[0.0, 0.2, 0.4, 0.9, 1.3, 3.0] {
            assert!((h.eval(t) - g.eval(t)).abs() < 1e-14);
            assert!((c.eval(t) - g.eval(0.8 * t + 0.1)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(PiecewisePoly::new(vec![0.0, 0.0], vec![Poly::constant(1.0); 2]).is_err());
        assert!(PiecewisePoly::new(vec![], vec![]).is_err());
    }
}
