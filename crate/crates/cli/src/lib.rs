//! Command-line driver for the dimerized XY chain quantum battery: argument
//! and config handling, CSV/JSON export, and the `verify` cross-check suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

pub use commands::{run_command, TOOL_VERSION};
pub use config::{Cli, Command, Format, RunConfig};
pub use error::{CliError, Result};
pub use output::Table;
