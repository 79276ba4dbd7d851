//! Command-line front end: state files, analysis commands and the benchmark harness.

pub mod commands;
pub mod error;
pub mod format;
pub mod statefile;

pub use commands::{run, Cli};
pub use error::CliError;
pub use statefile::StateFile;
