//! Command-line front end for `pelastica`: curves, obstacle solves, threshold
//! tables, nonexistence bounds and parameter sweeps written as CSV, JSON and SVG.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, Outcome};
pub use config::RunConfig;
pub use error::{CliError, Result};
