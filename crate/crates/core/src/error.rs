use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function} has a pole at {at}")]
    Pole { function: &'static str, at: Complex64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("K-Bessel argument {0} is beyond the exponential floor")]
    Underflow(f64),

    /// The value was computed but its truncation estimate exceeds the requested tolerance.
    #[error("truncation estimate {tail:e} exceeds tolerance {tol:e} (value {value})")]
    Truncation { value: Complex64, tail: f64, tol: f64 },

    #[error("continuation did not settle: remainder estimate {estimate:e} > {tol:e}")]
    Continuation { estimate: f64, tol: f64 },

    #[error("transfer tail diverges: Re 2s + tail_order = {0} <= 1")]
    TailDivergence(f64),

    #[error("zeta argument {0} is within the pole guard of 1")]
    PoleGuard(Complex64),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("invalid coefficient data: {0}")]
    InvalidCoefficients(String),
}

impl Error {
    pub(crate) fn pole(function: &'static str, at: Complex64) -> Self {
        Error::Pole { function, at }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Exit-code class used by the CLI: 3 for domain-type failures, 1 otherwise.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Pole { .. } | Error::Domain(_) | Error::Underflow(_) | Error::PoleGuard(_)
        )
    }
}
