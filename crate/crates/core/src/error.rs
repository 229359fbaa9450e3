use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("eigensolver did not converge after {iterations} iterations (eigenvalue {index})")]
    NoConvergence { iterations: usize, index: usize },

    /// Energy too close to the spectrum of the lower diagonal block.
    #[error("energy {energy} lies within {tolerance:e} of sigma(D) (nearest eigenvalue {nearest})")]
    SingularEnergy { energy: f64, nearest: f64, tolerance: f64 },

    #[error("matrix is numerically singular (condition estimate {condition:e})")]
    SingularMatrix { condition: f64 },

    #[error("no sign change of C_k(e) - e on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("iteration diverged: {0}")]
    Divergence(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("format error: {0}")]
    Format(String),

    /// Malformed or inconsistent run configuration.
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Errors caused by the caller's input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Precondition(_) | Error::InvalidArgument(_) | Error::Json(_))
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
