//! Experiment configuration shared by the CLI and the test harness.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use vare::benchmarks::{by_name, DynamicProblem};
use vare::engine::{AlgorithmConfig, VariationOperator};
use vare::response::ResponseMode;

use crate::error::{HarnessError, Result};

/// Algorithm variant selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Adaptive mix of prediction and hypermutation.
    Vare,
    /// Prediction only (hypermutation only as precondition fallback).
    VarOnly,
    /// Hypermutation only.
    EahOnly,
}

impl Variant {
    pub fn response_mode(self) -> ResponseMode {
        match self {
            Variant::Vare => ResponseMode::Adaptive,
            Variant::VarOnly => ResponseMode::PredictionOnly,
            Variant::EahOnly => ResponseMode::MutationOnly,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::Vare => "vare",
            Variant::VarOnly => "var-only",
            Variant::EahOnly => "eah-only",
        };
        f.write_str(s)
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "vare" => Ok(Variant::Vare),
            "var-only" => Ok(Variant::VarOnly),
            "eah-only" => Ok(Variant::EahOnly),
            other => Err(format!(
                "unknown variant '{other}' (expected vare, var-only or eah-only)"
            )),
        }
    }
}

/// Reproduction operator selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorChoice {
    RmMeda,
    SbxPm,
}

impl OperatorChoice {
    pub fn variation_operator(self) -> VariationOperator {
        match self {
            OperatorChoice::RmMeda => VariationOperator::default(),
            OperatorChoice::SbxPm => VariationOperator::SbxPolynomial,
        }
    }
}

impl fmt::Display for OperatorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OperatorChoice::RmMeda => "rm-meda",
            OperatorChoice::SbxPm => "sbx-pm",
        };
        f.write_str(s)
    }
}

impl FromStr for OperatorChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rm-meda" => Ok(OperatorChoice::RmMeda),
            "sbx-pm" => Ok(OperatorChoice::SbxPm),
            other => Err(format!(
                "unknown operator '{other}' (expected rm-meda or sbx-pm)"
            )),
        }
    }
}

/// One experiment: several independent seeded runs of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: String,
    /// Severity divisor n_t.
    pub severity: u32,
    /// Generations per environment τ_t.
    pub frequency: u32,
    /// Environments per run.
    pub environments: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub variant: Variant,
    /// VAR lag order l.
    pub lag: usize,
    /// Success-window multiplier γ (window spans γ·l environments).
    pub gamma: usize,
    pub operator: OperatorChoice,
    /// Simplex-lattice resolution; default depends on the objective count.
    pub lattice_resolution: Option<usize>,
    /// True-PF sample size per environment.
    pub pf_samples: usize,
    pub out_dir: PathBuf,
    /// Parallel run workers; 0 picks the available parallelism.
    pub workers: usize,
    /// Also write the PF reference set of every environment as CSV.
    pub export_pf: bool,
}

impl ExperimentConfig {
    pub fn new(problem: impl Into<String>, out_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            problem: problem.into(),
            severity: 10,
            frequency: 10,
            environments: 50,
            runs: 5,
            base_seed: 1,
            variant: Variant::Vare,
            lag: 5,
            gamma: 1,
            operator: OperatorChoice::RmMeda,
            lattice_resolution: None,
            pf_samples: 10_000,
            out_dir: out_dir.into(),
            workers: 0,
            export_pf: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(HarnessError::InvalidConfig("runs must be ≥ 1".into()));
        }
        if self.environments < 1 {
            return Err(HarnessError::InvalidConfig(
                "environments must be ≥ 1".into(),
            ));
        }
        if self.lag < 1 {
            return Err(HarnessError::InvalidConfig("lag must be ≥ 1".into()));
        }
        if self.gamma < 1 {
            return Err(HarnessError::InvalidConfig("gamma must be ≥ 1".into()));
        }
        if self.pf_samples < 1 {
            return Err(HarnessError::InvalidConfig("pf-samples must be ≥ 1".into()));
        }
        // reject unknown problems before any run starts
        self.problem()?;
        Ok(())
    }

    pub fn problem(&self) -> Result<std::sync::Arc<dyn DynamicProblem>> {
        Ok(by_name(&self.problem, None)?)
    }

    /// Algorithm configuration of the run with index `run`.
    pub fn algorithm_config(&self, problem: &dyn DynamicProblem, run: usize) -> AlgorithmConfig {
        let mut cfg = AlgorithmConfig::for_problem(problem);
        if let Some(h) = self.lattice_resolution {
            cfg.lattice_resolution = h;
        }
        cfg.lag = self.lag;
        cfg.window_multiplier = self.gamma;
        cfg.response_mode = self.variant.response_mode();
        cfg.operator = self.operator.variation_operator();
        cfg.environments = self.environments;
        cfg.change_frequency = self.frequency;
        cfg.change_severity = self.severity;
        cfg.seed = self.base_seed + run as u64;
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_round_trips_through_strings() {
        for v in [Variant::Vare, Variant::VarOnly, Variant::EahOnly] {
            assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
        }
        assert!("zzz".parse::<Variant>().is_err());
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut cfg = ExperimentConfig::new("df1", "/tmp/x");
        cfg.runs = 0;
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::new("nope", "/tmp/x");
        cfg.runs = 1;
        assert!(cfg.validate().is_err());

        assert!(ExperimentConfig::new("df4", "/tmp/x").validate().is_ok());
    }

    #[test]
    fn per_run_seeds_increment() {
        let cfg = ExperimentConfig::new("df1", "/tmp/x");
        let problem = cfg.problem().unwrap();
        assert_eq!(cfg.algorithm_config(problem.as_ref(), 0).seed, 1);
        assert_eq!(cfg.algorithm_config(problem.as_ref(), 3).seed, 4);
    }
}
