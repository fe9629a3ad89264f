use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("missing --{0} (give the flag or set `{0}` in the config file)")]
    Missing(&'static str),
    #[error("invalid --{field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("config file {path}: {reason}")]
    Config { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("resource cap: {0}")]
    Cap(String),
}

impl CliError {
    pub fn invalid(field: &'static str, reason: impl ToString) -> Self {
        CliError::Invalid {
            field,
            reason: reason.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Missing(_)
            | CliError::Invalid { .. }
            | CliError::Config { .. }
            | CliError::Io { .. } => 1,
            CliError::Degenerate(_) => 2,
            CliError::Cap(_) => 3,
        }
    }
}
