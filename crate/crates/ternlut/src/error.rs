//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// The variants map onto the tool's exit-code contract: `VerificationFailure`
/// is the only class a checker run reports as exit code 1; everything else is
/// a usage, format, or I/O problem (exit code 2).
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An encoded weight stream is malformed (bad magic, version, key, or length).
    #[error("corrupt stream: {0}")]
    CorruptStream(String),

    /// An oracle or self-check found a mismatch.
    #[error("verification failed: {0}")]
    VerificationFailure(String),

    /// A constrained search produced an empty feasible set.
    #[error("no feasible design: {0}")]
    NoFeasibleDesign(String),

    /// A text input (matrix, activations, coefficients, sweep spec) failed to parse.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn corrupt(msg: impl Into<String>) -> Self {
        Error::CorruptStream(msg.into())
    }
}
