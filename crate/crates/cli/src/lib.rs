//! Library side of the `risk` command: scenario ingestion, report
//! configuration, table rendering and the self-check subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod scenario;

pub use config::ReportConfig;
pub use error::{CliError, CliResult};
pub use report::{report, OutputFormat, Report};
pub use scenario::{ingest, ScenarioFormat, ScenarioTable};
