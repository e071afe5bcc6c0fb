//! File formats and command-line front end for the `qlsw-core` simulator.

pub mod cli;
pub mod commands;
pub mod error;
pub mod formats;

pub use error::CliError;
