//! Error type shared by every module of the crate.

use std::path::PathBuf;

/// Failure categories. The CLI maps these onto process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numeric limit exceeds what the implementation supports.
    #[error("bounds error: {0}")]
    Bounds(String),

    /// A finite structure would grow past its size cap.
    #[error("size error: {0}")]
    Size(String),

    /// Inputs are individually valid but structurally inconsistent.
    #[error("structure error: {0}")]
    Structure(String),

    /// The requested combination is valid but not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Arithmetic modes of two series differ.
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    /// A least-squares fit could not be carried out.
    #[error("fit error: {0}")]
    Fit(String),

    /// Two independent computations of the same quantity disagree.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("cache file {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this failure: 1 for configuration and I/O
    /// problems, 2 for bounds, 3 for internal-consistency failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Bounds(_) | Error::Size(_) => 2,
            Error::Consistency(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
