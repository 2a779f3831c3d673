use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{context}: {source}")]
    Input {
        context: String,
        #[source]
        source: stormfreq_core::Error,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: stormfreq_core::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn input(context: impl Into<String>, source: stormfreq_core::Error) -> Self {
        Self::Input { context: context.into(), source }
    }

    pub fn numerical(context: impl Into<String>, source: stormfreq_core::Error) -> Self {
        Self::Numerical { context: context.into(), source }
    }

    /// 2 for unreadable or invalid input and configuration, 3 for failures
    /// inside the numerics.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Numerical { .. } => 3,
            _ => 2,
        }
    }
}
