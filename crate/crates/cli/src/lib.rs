//! Command-line harness around the `wmgrit` library.

pub mod args;
pub mod commands;
pub mod config;
pub mod records;
pub mod tables;

pub use args::Cli;
pub use commands::{run, Outcome};
pub use config::ConfigError;
