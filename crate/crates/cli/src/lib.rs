//! Command-line driver: seeded instances, cross-checked routes, JSON/CSV reports.

pub mod config;
pub mod report;
pub mod run;
pub mod verify;

pub use config::{ConfigError, RunConfig, VerifyConfig};
pub use report::EvalReport;
