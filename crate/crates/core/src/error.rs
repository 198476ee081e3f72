use std::fmt;

/// Error type shared across the crate.
///
/// The variants map onto the distinct process exit codes of the experiment
/// runner: validation failures, inconclusive numerical verdicts, and hard
/// numerical failures are reported separately.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid parameters or configuration (rejected before any computation).
    Validation(String),
    /// The computation ran but the requested verdict cannot be reached at the
    /// configured resolution (e.g. truncation too small, all sweep rows skipped).
    Inconclusive(String),
    /// Numerical failure: CFL violation, divergent fitted constant,
    /// non-converging quadrature, exhausted step budget.
    Numerical(String),
    /// File input/output failure.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
            Error::Inconclusive(msg) => write!(f, "inconclusive: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
