//! Repeated-split benchmarking of the OExNRule ensemble against kNN and
//! weighted kNN.
//!
//! [`experiment::run_experiment`] splits each dataset `repeats` times, scores
//! every method on every split and returns an [`report::ExperimentReport`],
//! which [`report::emit_report`] and [`report::emit_boxplot_data`] write out
//! as CSV, JSON and markdown tables.

pub mod catalog;
pub mod config;
pub mod error;
pub mod experiment;
pub mod reference;
pub mod report;

pub use config::{DatasetSource, ExperimentConfig, Method};
pub use error::BenchError;
pub use experiment::run_experiment;
pub use report::{emit_boxplot_data, emit_report, ExperimentReport, Format};
