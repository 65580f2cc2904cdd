use thiserror::Error;

/// Errors produced by the matrix kernels, the solver, the generators and the
/// file readers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LarosError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dual certificate unavailable: {0}")]
    CertificateUnavailable(String),

    #[error("solver did not converge in round {round}: {iterations} iterations, gap {gap:e}")]
    NotConverged {
        round: usize,
        iterations: usize,
        gap: f64,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl LarosError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        LarosError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for LarosError {
    fn from(e: std::io::Error) -> Self {
        LarosError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LarosError>;
