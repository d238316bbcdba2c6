//! Crate-wide error type.

use std::path::PathBuf;

/// Errors raised by the simulators, device models, and the comparison front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside its documented domain (index range, vector
    /// length, sweep bounds, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A beamsplitter specification violates `R + T = 1` or holds a
    /// non-finite parameter.
    #[error("invalid beamsplitter spec: {0}")]
    InvalidSpec(String),

    /// Decoding was asked for an all-zero mode vector.
    #[error("no signal: mode vector carries zero energy")]
    NoSignal,

    /// A substrate failed to concentrate the codeword onto a single output.
    #[error("decode failure: {0}")]
    DecodeFailure(String),

    /// A current model was evaluated outside its operating region.
    #[error("mode error: {0}")]
    Mode(String),

    /// The gate voltage never passes the plateau, so the device cannot switch on.
    #[error("no turn-on: {0}")]
    NoTurnOn(String),

    /// Device calibration is impossible at the requested operating point.
    #[error("calibration error: {0}")]
    Calibration(String),

    /// An internal invariant was violated; indicates a bug, not bad input.
    #[error("internal consistency error: {0}")]
    Internal(String),

    /// Invalid configuration (unknown preset, unparsable policy, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A file could not be read or written.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
