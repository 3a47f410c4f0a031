//! Special functions used by the weight evaluators.
//!
//! The Poisson and negative-binomial log-densities follow Loader's
//! saddle-point decomposition (`stirlerr` + `bd0`), which keeps full relative
//! accuracy when the index and the rate are both large. The naive
//! `v ln(lambda) - lambda - ln Gamma(v + 1)` loses roughly `log10(v)` digits.

use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Natural logarithm of the Gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Error of Stirling's approximation,
/// `ln Gamma(n + 1) - ((n + 1/2) ln n - n + ln sqrt(2 pi))`.
pub fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;

    if n <= 15.0 {
        return ln_gamma(n + 1.0) - (n + 0.5) * n.ln() + n - LN_SQRT_2PI;
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x / np) + np - x`, evaluated without cancellation
/// when `x` is close to `np`.
pub fn bd0(x: f64, np: f64) -> f64 {
    if !x.is_finite() || !np.is_finite() || np == 0.0 {
        return f64::INFINITY;
    }
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / f64::from(2 * j + 1);
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// `ln` of the Poisson probability mass `lambda^k e^{-lambda} / k!`.
pub fn ln_poisson_pmf(k: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if k == 0 {
        return -lambda;
    }
    let kf = k as f64;
    -stirlerr(kf) - bd0(kf, lambda) - 0.5 * (2.0 * PI * kf).ln()
}

/// `ln` of the negative-binomial mass
/// `Gamma(size + k) / (Gamma(size) k!) * p^size * q^k` with `q = 1 - p`.
///
/// `p` and `q` are passed separately so callers can form both without
/// cancellation.
pub fn ln_negbin_pmf(k: u64, size: f64, p: f64, q: f64) -> f64 {
    if k == 0 {
        return size * p.ln();
    }
    if q == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    let kf = k as f64;
    let total = size + kf;
    let lc =
        stirlerr(total) - stirlerr(size) - stirlerr(kf) - bd0(size, total * p) - bd0(kf, total * q);
    let lf = (2.0 * PI).ln() + size.ln() + (kf / total).ln();
    (size / total).ln() + lc - 0.5 * lf
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn stirlerr_matches_definition_across_branches() {
        for &n in &[0.5, 1.0, 3.5, 14.9, 15.5, 20.0, 36.0, 81.0, 120.0, 501.0] {
            let direct = ln_gamma(n + 1.0) - (n + 0.5) * f64::ln(n) + n - LN_SQRT_2PI;
            // direct form loses digits for large n; compare absolutely
            assert!((stirlerr(n) - direct).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn bd0_series_and_direct_agree_near_switch() {
        let x = 100.0;
        for &np in &[80.0, 90.0, 95.0, 99.0, 101.0, 110.0, 125.0] {
            let direct = x * f64::ln(x / np) + np - x;
            assert!(rel(bd0(x, np), direct) < 1e-9, "np = {np}");
        }
        assert_eq!(bd0(5.0, 5.0), 0.0);
    }

    #[test]
    fn poisson_pmf_small_cases() {
        assert!(rel(ln_poisson_pmf(1, 1.0), -1.0) < 1e-15);
        assert!(rel(ln_poisson_pmf(0, 2.5), -2.5) < 1e-15);
        // 3^4 e^-3 / 24
        let expected = (81.0f64 * (-3.0f64).exp() / 24.0).ln();
        assert!(rel(ln_poisson_pmf(4, 3.0), expected) < 1e-14);
    }

    #[test]
    fn negbin_matches_binomial_form() {
        // size 5, k 3, p = 1/(1+t), t = 0.7
        let t: f64 = 0.7;
        let p = 1.0 / (1.0 + t);
        let q = t / (1.0 + t);
        let coeff = 35.0; // C(7, 3)
        let expected = (coeff * t.powi(3) / (1.0 + t).powi(8)).ln();
        assert!(rel(ln_negbin_pmf(3, 5.0, p, q), expected) < 1e-13);
        assert!(rel(ln_negbin_pmf(0, 5.0, p, q), -5.0 * (1.0 + t).ln()) < 1e-14);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-16).abs() < 1e-30);
    }
}
