//! Scenario files in, CSV and JSON out.

pub mod report;
pub mod runner;
pub mod scenario;

use k3glue_core::GeomError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("output error: {0}")]
    Io(String),
    #[error("scenario failed: {0}")]
    Failed(#[from] GeomError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}
