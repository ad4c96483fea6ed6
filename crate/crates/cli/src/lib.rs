//! Library side of the `coulomb-edge` command: run configurations, the
//! subcommands and the mapping from failures to exit codes.
//!
//! Exit codes: 0 pass, 1 numerical tolerance failure, 2 configuration error,
//! 3 precision exhaustion, 4 sampler failure.

pub mod commands;
pub mod config;

use std::path::Path;

use serde::de::DeserializeOwned;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] coulomb_edge::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        use coulomb_edge::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Csv(_) => 2,
            CliError::Core(E::Parameter(_) | E::Unsupported(_) | E::OffsetTooLarge { .. }) => 2,
            CliError::Core(E::Precision { .. }) => 3,
            CliError::Core(E::Envelope(_)) => 4,
            CliError::Core(_) => 1,
        }
    }
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
