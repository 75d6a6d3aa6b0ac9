use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// The variants line up with the process exit codes of the command-line
/// front end: usage and domain problems are caller mistakes, data errors come
/// from malformed inputs, numeric failures from algorithms that could not
/// produce a trustworthy value.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("{routine} did not converge after {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("numeric failure: {0}")]
    Degenerate(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for the two numeric-failure variants.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::Degenerate(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
