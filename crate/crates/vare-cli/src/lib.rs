//! Experiment harness for the vare optimiser: configuration, seeded batch
//! runs with plain-text outputs, rank-sum comparison and parameter sweeps.

pub mod config;
pub mod error;
pub mod experiment;
pub mod stats;

pub use config::{ExperimentConfig, OperatorChoice, Variant};
pub use error::{HarnessError, Result};
pub use experiment::{
    compare, load_summary, run_experiment, sweep, ComparisonReport, ExperimentSummary,
    SweepParameter, SweepRow, Verdict,
};
