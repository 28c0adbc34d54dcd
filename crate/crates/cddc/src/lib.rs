//! File formats, reports and the command-line front end for `cddc-core`.
//!
//! The `cddc` binary is a thin wrapper around [`cli::main_with_args`].

pub mod cli;
pub mod config;
pub mod crystal;
pub mod error;
pub mod report;
pub mod table;

pub use error::{CliError, Result};
