//! Experiment runner behind the `eqnn` binary: dataset generation, single
//! trainings, resumable sweeps, the DNN accuracy grid, SVG plots and the
//! self-check suites. Configuration files are TOML.

pub mod commands;
pub mod config;
mod error;
pub mod fsutil;
pub mod svg;

pub use error::{CliError, CliResult};
