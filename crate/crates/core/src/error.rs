use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error class, stable across releases; the CLI maps it to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    Io,
    Schema,
    Validation,
    Convergence,
}

impl ErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ErrorKind::Io => "E_IO",
            ErrorKind::Schema => "E_SCHEMA",
            ErrorKind::Validation => "E_VALIDATION",
            ErrorKind::Convergence => "E_CONVERGENCE",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Convergence(String),
    #[error("format version {found} is not supported (this build reads up to {supported})")]
    Version { found: u64, supported: u64 },
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::Schema(_) | Error::Version { .. } => ErrorKind::Schema,
            Error::Validation(_) => ErrorKind::Validation,
            Error::Convergence(_) => ErrorKind::Convergence,
            Error::Fold { source, .. } => source.kind(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_fold(self, fold: usize) -> Self {
        Error::Fold {
            fold,
            source: Box::new(self),
        }
    }
}

macro_rules! validation {
    ($($arg:tt)*) => { $crate::error::Error::Validation(format!($($arg)*)) };
}
macro_rules! schema {
    ($($arg:tt)*) => { $crate::error::Error::Schema(format!($($arg)*)) };
}
pub(crate) use schema;
pub(crate) use validation;
