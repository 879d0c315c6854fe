//! Library side of the `hardwall` command-line tool: config parsing,
//! experiment orchestration, CSV/JSON output, and the selftest suite.
//! The thin binary in `main.rs` maps errors to exit codes
//! (0 ok, 1 numeric, 2 config, 3 selftest).

pub mod commands;
pub mod config;
pub mod csvout;
pub mod manifest;
pub mod selftest;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numeric failure: {0}")]
    Numeric(#[from] hardwall::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("selftest failed: {0}")]
    Selftest(String),
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
            CliError::Selftest(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
