//! Command-line front end for `pathdev`: CSV ingestion, development and
//! signature features, gradient checks, training, evaluation and timing.

pub mod cli;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;

pub use error::{CliError, Result};
