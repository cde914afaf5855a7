//! Experiment runner behind the `bregflow` binary: configuration, runs,
//! CSV output and reproduction reports.

pub mod config;
pub mod reports;
pub mod runner;

pub use config::{RawConfig, RunConfig};
pub use runner::{run, Summary, TRAJECTORY_HEADER};
