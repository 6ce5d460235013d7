//! Config-driven experiment runner: parses flat dotted JSON, validates it,
//! runs one experiment or a parameter sweep and writes CSV/JSON artifacts.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration, 3 numerical failure.

pub mod config;
pub mod output;
pub mod runner;
pub mod sweep;

use std::path::Path;

use levyfp::LevyError;
use thiserror::Error;

pub use config::ExperimentConfig;
pub use runner::{run, RunOutcome};
pub use sweep::{sweep, SweepRow};

#[derive(Debug, Error)]
pub enum CliError {
    /// The config does not parse or names unknown keys.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Levy(#[from] LevyError),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Levy(e) if e.is_numerical() => 3,
            CliError::Levy(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

/// Read and parse a config file.
pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ExperimentConfig::parse(&text)
}
