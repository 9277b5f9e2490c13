use alloc::string::String;
use core::fmt;

/// Errors produced by the persistence engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A numeric argument is outside its documented range.
    InvalidParameter(String),
    /// Text input could not be parsed. `line` is 1-based.
    Parse {
        /// Offending line.
        line: usize,
        /// What went wrong.
        message: String,
    },
    /// A vertex index does not refer to a point of the cloud.
    IndexOutOfRange {
        /// The offending index.
        index: usize,
        /// Number of points.
        n: usize,
    },
    /// A filtration violates its ordering invariants.
    MalformedFiltration(String),
    /// The input has no meaningful answer, e.g. efficiency of a diagram without finite features.
    UndefinedInput(String),
}

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Parse { line, message } => write!(f, "parse error on line {line}: {message}"),
            Error::IndexOutOfRange { index, n } => {
                write!(f, "vertex index {index} out of range for {n} points")
            }
            Error::MalformedFiltration(msg) => write!(f, "malformed filtration: {msg}"),
            Error::UndefinedInput(msg) => write!(f, "undefined input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
