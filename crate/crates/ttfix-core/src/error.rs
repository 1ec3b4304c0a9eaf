//! Error type shared by the core crate.

use alloc::string::String;
use core::fmt;

/// Failures surfaced by the core algorithms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Malformed textual input.
    Parse { line: usize, column: usize, message: String },
    /// Structurally invalid input data (bad graph, bad map, bad inverse, ...).
    Invalid(String),
    /// The supplied map is not a relative train track; carries the witness.
    NotATrainTrack(String),
    /// An orbit question could not be settled within the horizon.
    OrbitUnknown { query: String, horizon: usize },
    /// A configured search bound was exhausted before the answer was certified.
    BoundExhausted(String),
    /// An internal consistency check failed.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, column, message } => {
                write!(f, "parse error at line {}, column {}: {}", line, column, message)
            }
            Error::Invalid(m) => write!(f, "invalid input: {}", m),
            Error::NotATrainTrack(m) => write!(f, "not a relative train track: {}", m),
            Error::OrbitUnknown { query, horizon } => {
                write!(f, "orbit question undecided within horizon {}: {}", horizon, query)
            }
            Error::BoundExhausted(m) => write!(f, "search bound exhausted: {}", m),
            Error::Internal(m) => write!(f, "internal check failed: {}", m),
        }
    }
}

/// Result alias.
pub type Result<T> = core::result::Result<T, Error>;
