use thiserror::Error;

/// Errors produced by the reconciliation library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of an operation (negative SNR,
    /// unsupported algebra dimension, mismatched lengths, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed to reach its accuracy target.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An ensemble or code failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// Graph sampling exhausted its retry budget.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// A file could not be parsed in the expected format.
    #[error("format error: {0}")]
    Format(String),

    /// Physical parameters produce a state that violates the security model
    /// (symplectic eigenvalue below the vacuum floor, negative discriminant).
    #[error("model violation: {0}")]
    ModelViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
