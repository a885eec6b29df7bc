//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by synthesis, metric, and harness operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Input is structurally valid but degenerate (zero variance, zero norm).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Two operands have incompatible shapes.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// WAV file uses a codec outside PCM-16 / IEEE float-32.
    #[error("unsupported wav codec: {0}")]
    UnsupportedCodec(String),

    /// File ended early or a container header is corrupt.
    #[error("truncated or corrupt file: {0}")]
    Truncated(String),

    /// Text format parse failure with a 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Manifest fails validation (missing file, sparse indices).
    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateInput(msg.into())
    }
}
