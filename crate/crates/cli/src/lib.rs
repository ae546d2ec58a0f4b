//! Experiment runner for the `mfapc-core` controllers: TOML configs,
//! CSV/JSON outputs, SVG plots and a parallel sweep driver.

pub mod app;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;

pub use app::{main_with_args, Cli};
pub use config::{ExperimentConfig, LoadedConfig};
pub use error::CliError;
