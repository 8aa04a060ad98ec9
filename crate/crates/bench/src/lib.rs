//! Benchmark scenarios, reports and the command-line front end.

pub mod cli;
pub mod error;
pub mod filter;
pub mod report;
pub mod scenario;

pub use error::{BenchError, Result};
pub use report::{Format, Report, ReportRow};
pub use scenario::{run_scenario, Runner};
