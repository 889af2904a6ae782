//! Command-line front end for `spherical-core`: sampling to CSV, the named
//! verification suites, and weight-function tables.

pub mod checks;
pub mod commands;
pub mod config;
pub mod report;

use std::path::{Path, PathBuf};

use config::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] spherical_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Runs one parsed invocation. `Ok(false)` means a verification suite failed.
pub fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Sample(flags) => commands::sample(&flags.with_config_file()?).map(|()| true),
        Command::Verify(flags) => commands::verify(&flags.with_config_file()?),
        Command::Weights(flags) => commands::weights(&flags.with_config_file()?).map(|()| true),
    }
}
