//! Configuration, figure presets and deterministic CSV/JSON emission for the
//! `rtn-entangle` command-line tool.

pub mod commands;
pub mod config;
pub mod format;
pub mod presets;

use thiserror::Error;

pub use commands::{run, Command, McRow, Report};
pub use config::{Format, RunConfig};
pub use presets::Preset;

/// Exit status for a configuration or I/O problem.
pub const EXIT_CONFIG: u8 = 2;
/// Exit status when a validation run detects disagreement.
pub const EXIT_VALIDATION: u8 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
