//! Crate-wide error type and exit-code mapping for the CLI.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed content in an input file, with the offending line number.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// A precondition or domain invariant was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Bad configuration or command-line usage.
    #[error("config error: {0}")]
    Config(String),

    /// Underlying filesystem failure.
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A persisted index dump does not match the requested build keys.
    #[error("index cache miss: {0}")]
    CacheMiss(String),

    /// A validation check failed its stated tolerance.
    #[error("validation failed: {0}")]
    Validation(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 0 ok, 1 usage/config, 2 validation, 3 io.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::InvalidInput(_) | Error::Config(_) => 1,
            Error::Validation(_) => 2,
            Error::Io { .. } => 3,
            // A cache miss surfaces as a config-level problem when fatal.
            Error::CacheMiss(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_cli_contract() {
        assert_eq!(Error::Config("x".into()).exit_code(), 1);
        assert_eq!(Error::InvalidInput("x".into()).exit_code(), 1);
        assert_eq!(Error::Validation("x".into()).exit_code(), 2);
        assert_eq!(
            Error::io("p", std::io::Error::other("x")).exit_code(),
            3
        );
    }
}
