use thiserror::Error;

/// Errors raised by the algebra layer and the campaign drivers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different fields")]
    SpecMismatch,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("division by zero")]
    DivZero,

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("size guard: {0}")]
    SizeGuard(String),

    /// A dual-path check disagreed. This always indicates a library bug or a
    /// false mathematical claim, never bad user input.
    #[error("verification failure: {0}")]
    Violation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn bad_input(msg: impl Into<String>) -> Error {
    Error::BadInput(msg.into())
}

pub(crate) fn violation(msg: impl Into<String>) -> Error {
    Error::Violation(msg.into())
}
