//! Error type shared across the crate.
//!
//! The CLI maps error classes to process exit codes: configuration and
//! validation problems exit 2, calibration failures exit 3, step-size
//! guard violations exit 4.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input: bad cluster, band, pulse, codec argument, or config file.
    #[error("configuration error: {0}")]
    Config(String),

    /// Reference acquisition did not rise above the noise floor.
    #[error("calibration failure: {0}")]
    Calibration(String),

    /// The requested time step cannot resolve the dynamics.
    #[error("stability guard: {0}")]
    Stability(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Calibration(_) => 3,
            Error::Stability(_) => 4,
            _ => 2,
        }
    }
}
