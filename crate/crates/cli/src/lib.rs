//! Command-line front end: configuration schema, file formats and the
//! subcommands that bind the simulator modules into reproducible runs.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

pub use commands::{run, Cli, Command, Flags};
pub use error::{CliError, CliResult};
