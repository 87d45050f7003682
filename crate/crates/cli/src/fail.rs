use std::fmt;
use std::path::Path;

use mamprop::error::{Error, ErrorKind};

pub type CliResult<T> = Result<T, CliError>;

/// Failure reported as one `error: code=... msg=...` line.
#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub msg: String,
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError { kind: ErrorKind::Io, msg: format!("cannot access {}: {e}", path.display()) }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Validation, msg: msg.into() }
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Schema, msg: msg.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Io => 2,
            ErrorKind::Schema => 3,
            ErrorKind::Validation => 4,
            ErrorKind::Convergence => 5,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { kind: e.kind(), msg: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg: String = self.msg.chars().map(|c| if c == '\n' || c == '\r' { ' ' } else { c }).collect();
        write!(f, "error: code={} msg={}", self.kind.code(), msg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_kind_has_its_own_exit_code() {
        let codes: Vec<i32> = [ErrorKind::Io, ErrorKind::Schema, ErrorKind::Validation, ErrorKind::Convergence]
            .into_iter()
            .map(|kind| CliError { kind, msg: String::new() }.exit_code())
            .collect();
        assert_eq!(codes, [2, 3, 4, 5]);
    }

    #[test]
    fn message_stays_on_one_line() {
        let e = CliError::from(Error::Convergence("no\nprogress".into()));
        assert_eq!(e.to_string(), "error: code=E_CONVERGENCE msg=no progress");
        assert_eq!(e.exit_code(), 5);
    }
}
