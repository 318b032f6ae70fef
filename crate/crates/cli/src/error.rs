use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

/// Failure of a CLI run, mapped onto distinct exit statuses.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Compute(#[from] telegraph_core::Error),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub const COMPUTE: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const IO: u8 = 3;
    pub const CHECK: u8 = 4;

    pub fn status(&self) -> u8 {
        match self {
            CliError::Compute(_) => Self::COMPUTE,
            CliError::Config(_) => Self::CONFIG,
            CliError::Io { .. } => Self::IO,
            CliError::CheckFailed(_) => Self::CHECK,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.status())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
