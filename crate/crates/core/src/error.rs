use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid polynomial degree {degree}: {reason}")]
    InvalidDegree { degree: usize, reason: &'static str },

    #[error("mismatched operands: {0}")]
    KindMismatch(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("ill-conditioned system (condition number {condition:.3e} > {limit:.1e})")]
    Conditioning { condition: f64, limit: f64 },

    #[error("degenerate system: {0}")]
    Degeneracy(String),

    #[error("the bubble space of order 1 is trivial; the inf-sup constant is undefined")]
    TrivialBubbleSpace,

    #[error("chart error: {0}")]
    Chart(String),

    #[error("conformity violation: {0}")]
    Conformity(String),

    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("oracle failure: {0}")]
    OracleFailure(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
