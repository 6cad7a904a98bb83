//! Problem files, commands and reports for the `varparam` binary.

pub mod commands;
pub mod error;
pub mod problem;
pub mod report;

pub use commands::{run, run_batch, run_file, Command, Outcome};
pub use error::CliError;
pub use problem::{Problem, ProblemFile, FIXTURES};
pub use report::{BatchSummary, RunReport};
