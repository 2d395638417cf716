use thiserror::Error;

/// How a failure should be reported to a caller (the CLI maps these to exit codes).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or mathematically invalid input.
    Input,
    /// A configured resource cap was hit; the answer is unknown, never wrong.
    Resource,
    /// The computation cannot conclude from the data it was given.
    Inconclusive,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subspace containment fails: {0}")]
    NotContained(String),

    #[error("algebra fails validation: {0}")]
    InvalidAlgebra(String),

    #[error("resolution is not exact at position {position}, internal degree {degree}")]
    NotExact { position: usize, degree: i64 },

    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    ResourceCap {
        what: String,
        needed: usize,
        cap: usize,
    },

    #[error("truncation {have} is insufficient: increase truncation to at least {needed}")]
    TruncationInsufficient { needed: i64, have: i64 },

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::ResourceCap { .. } | Error::TruncationInsufficient { .. } | Error::Overflow(_) => ErrorKind::Resource,
            Error::Inconclusive(_) => ErrorKind::Inconclusive,
            _ => ErrorKind::Input,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
