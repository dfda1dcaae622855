//! Experiment harness for the `fairtree` command: cross-validated
//! comparisons, α sweeps, reports and charts.

pub mod chart;
pub mod experiment;
pub mod report;
pub mod synthetic;

pub use experiment::{
    fit_fold, prepare, run_experiment, sweep_alpha, Engine, ExperimentConfig, ExperimentResult, HarnessError, Method,
    SweepResult, Timings,
};
