use std::path::PathBuf;

use obstring_core::{ProbeError, SolverError};
use thiserror::Error;

/// Configuration error located in the source text.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}{field}: {reason}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    /// 1-based line in the config text, when known
    pub line: Option<usize>,
    /// `[section].key`, or `[section]` for a whole table
    pub field: String,
    pub reason: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("solver error: {0}")]
    Solver(#[from] SolverError),
    #[error("{0}")]
    Probe(#[from] ProbeError),
    #[error("render error: {0}")]
    Render(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 success, 2 configuration, 3 numeric blowup, 4 probe contract, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(SolverError::Config(_)) => 2,
            CliError::Solver(SolverError::Blowup { .. }) => 3,
            CliError::Probe(_) => 4,
            _ => 1,
        }
    }
}
