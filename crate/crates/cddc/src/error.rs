use std::path::PathBuf;

use cddc_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NoSolution(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                CoreError::NotFound(_) => 4,
                CoreError::InconsistentRecord(_) | CoreError::UndefinedRate(_) => 5,
                CoreError::Config(_) => 3,
                _ => 2,
            },
            CliError::Io { .. } | CliError::Parse { .. } => 3,
            CliError::Usage(_) => 2,
            CliError::NoSolution(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
