//! Batch front end of the `braidlab` binary: run configurations, report
//! rendering and golden-fixture regression.

pub mod commands;
pub mod config;
pub mod output;
pub mod regress;

pub use config::{parse_config, Command, ConfigError, Format, RunConfig};
pub use output::Report;
