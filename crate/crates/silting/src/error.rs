//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
///
/// The three variants correspond to the CLI exit codes: a failed mathematical
/// check (exit 1), a malformed or inconsistent input (exit 2), and a violated
/// internal invariant, which is always a bug rather than a user error
/// (exit 3).
#[derive(Debug, Error)]
pub enum Error {
    /// A check ran to completion and the property does not hold.
    #[error("check failed: {0}")]
    CheckFailed(String),

    /// The input document or configuration is invalid.
    #[error("input error: {0}")]
    Input(String),

    /// An internal invariant was violated; this is a bug in the library.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn check(msg: impl Into<String>) -> Self {
        Error::CheckFailed(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// Exit code for the CLI: 1 check failure, 2 input error, 3 internal bug.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CheckFailed(_) => 1,
            Error::Input(_) => 2,
            Error::Internal(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
