//! Experiment catalogue, multi-run orchestration, statistics and reporting.

pub mod catalog;
pub mod chart;
pub mod config;
pub mod report;
pub mod runner;
pub mod stats;

pub use catalog::{experiment_config, ExperimentSpec, UnknownExperiment, EXPERIMENT_IDS};
pub use runner::{aggregate, run_experiment, ExperimentResult, GroupSeries, SeriesPoint};
pub use stats::{welch_t_test, TTestResult};
