use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CONSTRAINT: u8 = 3;
pub const EXIT_RESOURCE: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("{source_name}: line {line}: {message}")]
    Csv {
        source_name: String,
        line: u64,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Core(#[from] pathdev::Error),

    /// A check ran to completion and reported failures.
    #[error("{0}")]
    CheckFailed(String),

    #[error("{0}")]
    Constraint(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Csv { .. } | CliError::Io { .. } => EXIT_INPUT,
            CliError::CheckFailed(_) => EXIT_CHECK_FAILED,
            CliError::Constraint(_) => EXIT_CONSTRAINT,
            CliError::Core(e) => match e {
                pathdev::Error::ConstraintViolation(_) => EXIT_CONSTRAINT,
                pathdev::Error::ResourceLimit(_) => EXIT_RESOURCE,
                pathdev::Error::Diverged { .. } => EXIT_CHECK_FAILED,
                _ => EXIT_INPUT,
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
