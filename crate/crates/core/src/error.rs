//! Crate-wide error type.

/// Errors reported by the library.
///
/// `InvalidInput` is for bad user-supplied data (non-prime-power `q`,
/// malformed polynomials, out-of-range parameters).  `Internal` marks a
/// violated invariant: it should never surface on valid input and any
/// occurrence is a bug.  `WorkLimitExceeded` is returned when a
/// computation is abandoned because it exceeded its configured budget;
/// callers are expected to degrade to an "undecided" answer rather than
/// report a wrong one.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("work limit exceeded: {0}")]
    WorkLimitExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
