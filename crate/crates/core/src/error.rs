use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degree {degree} exceeds the root-finder guard of {limit}")]
    DegreeGuard { degree: usize, limit: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e}); retry with {suggested_bits} mantissa bits")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        suggested_bits: u32,
    },

    #[error("ill-conditioned linear system: {0}")]
    IllConditioned(String),

    #[error("normalization degenerated: {0}")]
    DegenerateNormalization(String),

    #[error("oracle disagreement: breakpoint value {breakpoint:e} vs descent value {descent:e} (relative {relative:e})")]
    OracleDisagreement {
        breakpoint: f64,
        descent: f64,
        relative: f64,
    },

    #[error("input rejected: {0}")]
    Rejected(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
