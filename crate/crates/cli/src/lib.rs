//! Command-line harness: configuration files, presets, run artifacts, sweeps,
//! probes over finished runs and heatmap rendering.

pub mod config;
pub mod csv_io;
pub mod error;
pub mod heatmap;
pub mod manifest;
pub mod probe;
pub mod runner;
pub mod sweep;

pub use error::{CliError, ConfigError};
