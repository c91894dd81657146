use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// The automaton accepts the empty language where a nonempty one is required.
    #[error("empty language: {0}")]
    EmptyLanguage(String),

    /// A configurable resource cap was exceeded (subset states, expansion size, ...).
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// A precondition on the input was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An index was outside the valid range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
