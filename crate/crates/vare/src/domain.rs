//! Shared domain types: decision vectors, objective vectors, individuals and
//! the discrete-time context of a dynamic problem.

use std::sync::Arc;

use crate::error::Error;

/// Per-coordinate `(lower, upper)` box constraints, cheaply cloneable.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds(Arc<[(f64, f64)]>);

impl Bounds {
    pub fn new(pairs: Vec<(f64, f64)>) -> Self {
        debug_assert!(pairs.iter().all(|(lo, hi)| lo <= hi));
        Bounds(pairs.into())
    }

    /// Same `(lower, upper)` pair for every coordinate.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Self {
        Bounds::new(vec![(lower, upper); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn lower(&self, j: usize) -> f64 {
        self.0[j].0
    }

    pub fn upper(&self, j: usize) -> f64 {
        self.0[j].1
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.0
    }

    /// Clamp every coordinate into its box.
    pub fn repair(&self, values: &mut [f64]) {
        debug_assert_eq!(values.len(), self.dim());
        for (v, (lo, hi)) in values.iter_mut().zip(self.0.iter()) {
            *v = v.clamp(*lo, *hi);
        }
    }

    pub fn contains(&self, values: &[f64]) -> bool {
        values.len() == self.dim()
            && values
                .iter()
                .zip(self.0.iter())
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }
}

/// A point in decision space together with the box it must stay inside.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVector {
    pub values: Vec<f64>,
    pub bounds: Bounds,
}

impl DecisionVector {
    pub fn new(values: Vec<f64>, bounds: Bounds) -> Self {
        debug_assert_eq!(values.len(), bounds.dim());
        DecisionVector { values, bounds }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Clamp the vector into its bounds in place and return it.
    pub fn repaired(mut self) -> Self {
        let bounds = self.bounds.clone();
        bounds.repair(&mut self.values);
        self
    }

    pub fn in_bounds(&self) -> bool {
        self.bounds.contains(&self.values)
    }

    /// First coordinate outside its box, if any.
    pub fn bound_violation(&self) -> Option<Error> {
        for (j, (v, (lo, hi))) in self.values.iter().zip(self.bounds.pairs()).enumerate() {
            if *v < *lo || *v > *hi {
                return Some(Error::OutOfBounds {
                    index: j,
                    value: *v,
                    lower: *lo,
                    upper: *hi,
                });
            }
        }
        None
    }
}

/// An objective vector under minimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveVector {
    pub values: Vec<f64>,
}

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Self {
        ObjectiveVector { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// True when `self` Pareto-dominates `other` (minimisation).
    pub fn dominates(&self, other: &ObjectiveVector) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        let mut strictly_better = false;
        for (a, b) in self.values.iter().zip(other.values.iter()) {
            if a > b {
                return false;
            }
            if a < b {
                strictly_better = true;
            }
        }
        strictly_better
    }
}

/// A candidate solution: decision vector, its objectives and the environment
/// index at which those objectives were computed. Comparing `eval_env` against
/// the current environment exposes stale evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub decision: DecisionVector,
    pub objectives: ObjectiveVector,
    pub eval_env: u32,
}

impl Individual {
    pub fn new(decision: DecisionVector, objectives: ObjectiveVector, eval_env: u32) -> Self {
        Individual {
            decision,
            objectives,
            eval_env,
        }
    }

    pub fn is_stale(&self, current_env: u32) -> bool {
        self.eval_env != current_env
    }
}

/// Discrete-time state of a dynamic run.
///
/// Time follows the convention used by the DF/FDA suites:
/// `t = floor(generation / change_frequency) / change_severity`, so the
/// problem stays constant for `change_frequency` consecutive generations and
/// moves in steps of `1 / change_severity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeContext {
    /// Generation counter τ.
    pub generation: u32,
    /// Generations per environment τ_t.
    pub change_frequency: u32,
    /// Severity divisor n_t.
    pub change_severity: u32,
    /// Environments elapsed so far, `floor(τ / τ_t)`.
    pub environment_index: u32,
    /// Problem time t.
    pub time: f64,
}

impl TimeContext {
    pub fn at_generation(generation: u32, change_frequency: u32, change_severity: u32) -> Self {
        assert!(change_frequency >= 1, "change frequency must be positive");
        assert!(change_severity >= 1, "change severity must be positive");
        let environment_index = generation / change_frequency;
        let time = f64::from(environment_index) / f64::from(change_severity);
        TimeContext {
            generation,
            change_frequency,
            change_severity,
            environment_index,
            time,
        }
    }

    pub fn initial(change_frequency: u32, change_severity: u32) -> Self {
        TimeContext::at_generation(0, change_frequency, change_severity)
    }

    /// The context one generation later.
    pub fn advanced(&self) -> Self {
        TimeContext::at_generation(
            self.generation + 1,
            self.change_frequency,
            self.change_severity,
        )
    }
}
