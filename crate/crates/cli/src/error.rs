use std::path::PathBuf;

use thiserror::Error;

/// Exit code classes: 0 success, 1 semantic failure (invalid channel,
/// non-convergence), 2 input or usage error. Nothing else.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: parse error: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },

    #[error("{0}")]
    Semantic(String),

    #[error(transparent)]
    Core(#[from] choimap_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Semantic(_) => 1,
            CliError::Core(e) => match e {
                choimap_core::Error::NotPositiveSemidefinite { .. }
                | choimap_core::Error::ProjectionDidNotConverge { .. } => 1,
                _ => 2,
            },
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
