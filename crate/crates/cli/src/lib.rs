//! Configuration and execution behind the `boostcolony` binary.

pub mod config;
pub mod run;

pub use config::{resolve, ConfigError, Overrides, RunConfig};
pub use run::{run, Experiment};
