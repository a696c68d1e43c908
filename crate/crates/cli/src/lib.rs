//! Command-line driver for the gnncost cost simulator: dataset ingestion,
//! partitioning, epoch simulation, cost analysis, partition-count sweeps and
//! report emission.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use cli::{run, Cli};
pub use error::CliError;
