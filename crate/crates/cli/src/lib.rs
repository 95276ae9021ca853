//! Batch runner for the `aspi` command: configuration, run records and
//! subcommand implementations.

pub mod commands;
pub mod config;
pub mod record;

pub use commands::{cmd_profile, run, Cli, CliError, CmdOutput, Command};
pub use config::{ConfigError, ExperimentConfig};
pub use record::{load, persist, RecordBody, RecordError, RunRecord};
