use thiserror::Error;

/// Errors produced by the clustering library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two vectors (or a vector and a matrix) disagree in length.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A caller-supplied argument violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A relocation would leave its source cluster empty or is otherwise illegal.
    #[error("rejected move: {0}")]
    RejectedMove(String),

    /// An internal numeric consistency check failed.
    #[error("numeric invariant violated: {0}")]
    NumericInvariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
