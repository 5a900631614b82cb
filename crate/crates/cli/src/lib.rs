//! Config-driven scenario runner for the OAM frequency-transducer simulator.
//!
//! The library half of the `oamsim` binary: [`config`] defines the JSON
//! scenario schema, [`scenario`] runs a parsed config end to end, and
//! [`report`] serializes the structured results as JSON or CSV.

#![warn(missing_docs)]

pub mod config;
pub mod error;
pub mod report;
pub mod scenario;

pub use config::{ExperimentConfig, Mode, Scenario};
pub use error::CliError;
pub use report::{emit_csv, emit_json, parse_json, ResultsReport};
pub use scenario::run_scenario;
