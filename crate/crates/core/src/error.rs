use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method failed to converge. `best` holds the last estimate.
    #[error("numeric error: {message} (best estimate {best})")]
    Numeric { message: String, best: f64 },

    /// A request would exceed a hard memory bound.
    #[error("resource error: {0}")]
    Resource(String),

    /// Truncation retained fewer than two points, so no measure can be formed.
    #[error("degenerate truncation: only {retained} point(s) retained")]
    DegenerateTruncation { retained: usize },

    /// The base measure lacks a capability (currently only the CDF).
    #[error("capability error: {0}")]
    Capability(String),

    /// Malformed configuration or serialized input.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, best: f64) -> Self {
        Error::Numeric {
            message: msg.into(),
            best,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
