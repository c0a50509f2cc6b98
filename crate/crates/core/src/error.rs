use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid boundary condition: {0}")]
    InvalidBoundary(String),

    #[error("{what} has size {size}, above the configured limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u64,
        limit: u64,
    },

    /// A denominator fell below the near-zero tolerance. `modulus` is its absolute value.
    #[error("near-zero denominator |Z| = {modulus:e} at {at}")]
    NearZeroDenominator { modulus: f64, at: Complex64 },

    /// A sampled evaluation point of the analytic-continuation region hit (or enclosed) a zero.
    #[error("zero-region violation at {point}: {detail}")]
    ZeroRegionViolation { point: Complex64, detail: String },

    #[error("required truncation depth {required} exceeds the cap {cap}")]
    DepthExceeded { required: usize, cap: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

impl Error {
    /// True for errors that signal a violated analytic hypothesis rather than bad input.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(
            self,
            Error::NearZeroDenominator { .. }
                | Error::ZeroRegionViolation { .. }
                | Error::Hypothesis(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
