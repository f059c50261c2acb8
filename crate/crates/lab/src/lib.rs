//! Experiments and reports on top of `lane-emden-core`: the `lane-emden`
//! command line, JSON/CSV reports and parallel grid runs.

pub mod commands;
pub mod config;
pub mod numlist;
pub mod report;

pub use commands::{run, LabError, Outcome};
pub use config::{Cli, Command};
