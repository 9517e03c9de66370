//! Experiment harness: configuration, runs, CSV traces, SVG plots and the
//! rate region map. The `fistashift` binary is a thin CLI over this crate.

pub mod config;
pub mod csv;
pub mod error;
pub mod experiment;
pub mod plot;
pub mod region;

pub use config::{AlgorithmSpec, DeltaSpec, ExperimentConfig, InstanceSpec, OutputSpec};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ExperimentReport, InstanceReport, RunReport};
