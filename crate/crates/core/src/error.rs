use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid problem constants: {0}")]
    InvalidConstants(String),

    #[error("{name} = {value} is outside its domain ({domain})")]
    Domain {
        name: &'static str,
        value: f64,
        domain: String,
    },

    #[error("step size gamma = {gamma} is not admissible: {reason}")]
    StepSize { gamma: f64, reason: String },

    #[error("iteration diverged at k = {iteration}: {what} is not finite")]
    Divergence { iteration: usize, what: &'static str },

    #[error("objective is not finite at the starting point")]
    InfeasibleStart,

    #[error("{0} is unavailable")]
    Unavailable(&'static str),

    #[error("normalization is degenerate: {0}")]
    DegenerateNormalization(&'static str),

    #[error("invalid sequence: {0}")]
    Sequence(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix factorization failed: {0}")]
    Factorization(String),

    #[error("{what} did not converge after {iterations} iterations (last estimate {estimate})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        estimate: f64,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
