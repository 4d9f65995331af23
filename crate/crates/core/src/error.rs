//! Error type shared by all modules of the crate.

use std::fmt;
use std::path::PathBuf;

/// Errors produced by beam construction, simulation, reconstruction and
/// Bell analysis.
#[derive(Debug)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation
    /// (non-finite input, refractive index <= 1, zero waist, ...).
    Domain(String),
    /// A grid, shear or run configuration is inconsistent with the request
    /// (grid too small, shear outside the grid, missing slice, ...).
    Config(String),
    /// Input data violates an integrity bound (negative intensity beyond the
    /// noise floor, parity value outside [-1, 1], ...).
    DataIntegrity(String),
    /// A value lies outside the calibrated or sampled range.
    Range(String),
    /// The momentum-axis calibration fit did not meet its residual bound.
    Calibration(String),
    /// File I/O failed; carries the path for context.
    Io { path: PathBuf, source: std::io::Error },
    /// A file exists but its contents could not be parsed.
    Parse { path: PathBuf, message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::DataIntegrity(msg) => write!(f, "data integrity error: {msg}"),
            Error::Range(msg) => write!(f, "range error: {msg}"),
            Error::Calibration(msg) => write!(f, "calibration failure: {msg}"),
            Error::Io { path, source } => write!(f, "i/o error at {}: {source}", path.display()),
            Error::Parse { path, message } => {
                write!(f, "malformed file {}: {message}", path.display())
            }
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), message: message.into() }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
