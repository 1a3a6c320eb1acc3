use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),

    #[error("invalid arguments: {0}")]
    Usage(String),

    #[error("invariant violated during the run: {0}")]
    Invariant(#[source] onlinefwer::Error),

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration and argument errors, 3 for invariant violations,
    /// 1 for output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Output { .. } => 1,
        }
    }
}
