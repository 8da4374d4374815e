//! Command-line harness for the five roles of an IPFE-FR deployment,
//! backed by a directory keystore, plus a timing report.

pub mod bench;
pub mod cli;
pub mod commands;
pub mod error;
pub mod keystore;

pub use error::{CliError, CliResult};
