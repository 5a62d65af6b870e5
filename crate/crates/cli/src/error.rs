use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: row {row}: {message}")]
    Malformed {
        path: PathBuf,
        row: u64,
        message: String,
    },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Simulation(Box<dyn std::error::Error + Send + Sync>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Malformed { .. } => 1,
            CliError::Io { .. } => 2,
            CliError::Validation(_) => 3,
            CliError::Simulation(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn sim(e: impl std::error::Error + Send + Sync + 'static) -> Self {
        CliError::Simulation(Box::new(e))
    }
}
