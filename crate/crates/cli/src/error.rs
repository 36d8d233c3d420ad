use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("config error in {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error(transparent)]
    Model(#[from] qbat_core::Error),

    #[error(transparent)]
    Oracle(#[from] qbat_ed::EdError),

    #[error("{failed} verification check(s) exceeded tolerance")]
    VerificationFailed { failed: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(flag: &str, message: impl std::fmt::Display) -> Self {
        CliError::Usage(format!("--{flag}: {message}"))
    }

    /// Process exit status: 1 usage, 2 numerical, 3 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::ConfigParse { .. } => 1,
            CliError::Model(_) | CliError::Oracle(_) | CliError::VerificationFailed { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
