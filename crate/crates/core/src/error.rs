use thiserror::Error;

/// Errors raised by operator evaluation and the moment/bound machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid operator spec: {0}")]
    InvalidSpec(String),

    #[error(
        "truncation cap exceeded: mass 1 - eps not reached by v_cap = {v_cap} (a = {a}, mu = {mu})"
    )]
    TruncationCapExceeded { a: f64, mu: f64, v_cap: usize },

    #[error("divergent integral: requires {requirement}")]
    DivergentIntegral { requirement: String },

    #[error("quadrature did not converge within {panels} panels (estimate {estimate:e}, error {error:e})")]
    QuadratureNoConvergence {
        panels: usize,
        estimate: f64,
        error: f64,
    },

    #[error("unsupported moment order {0}: closed forms exist for m <= 2")]
    UnsupportedOrder(u32),

    #[error("insufficient n: requires {requirement}")]
    InsufficientN { requirement: String },

    #[error("sandwich violated: T2 = {t2:e} <= 0 at n = {n}, x = {x}, mu = {mu}")]
    SandwichViolated { n: u32, x: f64, mu: f64, t2: f64 },

    #[error("growth envelope violated at t = {t}: |f(t)| = {value:e} exceeds {bound:e}")]
    EnvelopeViolated { t: f64, value: f64, bound: f64 },
}

impl Error {
    /// True for failures caused by hitting a numeric resource cap rather than
    /// by invalid input.
    pub fn is_numeric_cap(&self) -> bool {
        matches!(
            self,
            Error::TruncationCapExceeded { .. } | Error::QuadratureNoConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
