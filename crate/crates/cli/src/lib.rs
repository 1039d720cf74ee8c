pub mod checkpoint;
pub mod config;
pub mod error;
pub mod timeseries;

pub use error::{CliError, Result};
pub mod runner;
