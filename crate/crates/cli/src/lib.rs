//! The `mgsr` command line: configuration, CSV ingestion, population
//! archives, exports and standalone HTML reports.

pub mod archive;
pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod html;
pub mod payload;

pub use archive::Archive;
pub use commands::{execute, Cli, Command};
pub use config::ProjectConfig;
pub use error::{CliError, CliResult};
