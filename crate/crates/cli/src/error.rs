use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] ndr_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 ok, 1 failed validation, 2 domain or usage error, 3 convergence
    /// failure, 4 I/O.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Validation(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Core(ndr_core::Error::Convergence { .. }) => 3,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 4,
        })
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_taxonomy() {
        let conv = CliError::Core(ndr_core::Error::Convergence {
            context: "2F1".into(),
            terms: 10,
            residual: 1.0,
        });
        assert_eq!(conv.exit_code(), ExitCode::from(3));
        assert_eq!(CliError::Validation("x".into()).exit_code(), ExitCode::from(1));
        assert_eq!(CliError::Usage("x".into()).exit_code(), ExitCode::from(2));
        assert_eq!(CliError::io("p", std::io::Error::other("x")).exit_code(), ExitCode::from(4));
    }
}
