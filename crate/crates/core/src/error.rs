use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole of {0}")]
    Pole(&'static str),
    #[error("invalid discriminant {0}: {1}")]
    InvalidDiscriminant(u64, &'static str),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("quadrature failed on [{a}, {b}]: error estimate {error:e} above tolerance {tolerance:e}")]
    Quadrature { a: f64, b: f64, error: f64, tolerance: f64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("interrupted")]
    Interrupted,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
