//! Dynamic test problems (DF1, DF4, DF5, FDA4) with analytic Pareto-front
//! sampling per environment, plus the cached reference sets used by the
//! metrics.
//!
//! All problems follow the step-time convention of
//! [`TimeContext`](crate::domain::TimeContext): the problem is frozen within
//! an environment and moves by `1 / n_t` between environments.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::{Arc, Mutex};

use crate::domain::{Bounds, DecisionVector, ObjectiveVector, TimeContext};
use crate::error::{Error, Result};
use crate::metrics;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// A time-dependent multi-objective minimisation problem.
///
/// Evaluation must be deterministic in `(x, t)`; true-PF samples must be
/// pairwise nondominated.
pub trait DynamicProblem: Send + Sync {
    fn name(&self) -> &str;
    /// Decision-space dimension n.
    fn decision_dim(&self) -> usize;
    /// Objective-space dimension M.
    fn objective_dim(&self) -> usize;
    fn bounds(&self) -> Bounds;
    fn evaluate(&self, x: &DecisionVector, t: f64) -> Result<ObjectiveVector>;
    /// `count` points on the analytic PF at time `t`, uniform in the PF's
    /// natural parameterisation.
    fn sample_true_pf(&self, t: f64, count: usize) -> Vec<ObjectiveVector>;
    /// Ideal and nadir points of the true PF at time `t`.
    fn true_bounds(&self, t: f64) -> (ObjectiveVector, ObjectiveVector);
}

/// Advance the run clock by one generation.
pub fn advance_time(ctx: &TimeContext) -> TimeContext {
    ctx.advanced()
}

fn check_input(problem: &dyn DynamicProblem, x: &DecisionVector) -> Result<()> {
    if x.dim() != problem.decision_dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.decision_dim(),
            got: x.dim(),
        });
    }
    match x.bound_violation() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn linspace(count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![0.0];
    }
    (0..count).map(|i| i as f64 / (count - 1) as f64).collect()
}

/// DF1: biobjective, PS and PF both move; PF is `f2 = 1 − f1^H`.
#[derive(Debug, Clone)]
pub struct Df1 {
    n: usize,
}

impl Df1 {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        Df1 { n }
    }
}

impl DynamicProblem for Df1 {
    fn name(&self) -> &str {
        "DF1"
    }

    fn decision_dim(&self) -> usize {
        self.n
    }

    fn objective_dim(&self) -> usize {
        2
    }

    fn bounds(&self) -> Bounds {
        Bounds::uniform(self.n, 0.0, 1.0)
    }

    fn evaluate(&self, x: &DecisionVector, t: f64) -> Result<ObjectiveVector> {
        check_input(self, x)?;
        let big_g = (0.5 * PI * t).sin().abs();
        let h = 0.75 * (0.5 * PI * t).sin() + 1.25;
        let g = 1.0
            + x.values[1..]
                .iter()
                .map(|&xi| (xi - big_g) * (xi - big_g))
                .sum::<f64>();
        let f1 = x.values[0];
        let f2 = g * (1.0 - (f1 / g).powf(h));
        Ok(ObjectiveVector::new(vec![f1, f2]))
    }

    fn sample_true_pf(&self, t: f64, count: usize) -> Vec<ObjectiveVector> {
        let h = 0.75 * (0.5 * PI * t).sin() + 1.25;
        linspace(count)
            .into_iter()
            .map(|s| ObjectiveVector::new(vec![s, 1.0 - s.powf(h)]))
            .collect()
    }

    fn true_bounds(&self, _t: f64) -> (ObjectiveVector, ObjectiveVector) {
        (
            ObjectiveVector::new(vec![0.0, 0.0]),
            ObjectiveVector::new(vec![1.0, 1.0]),
        )
    }
}

/// DF4: biobjective with a variable linkage `x_j ≈ a (x_1 / c)^2` on the PS
/// and a PF `{(s^H, (b−s)^H) : s ∈ [0, b]}` whose scale changes over time.
#[derive(Debug, Clone)]
pub struct Df4 {
    n: usize,
}

impl Df4 {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        Df4 { n }
    }

    fn params(t: f64) -> (f64, f64, f64, f64) {
        let a = (0.5 * PI * t).sin();
        let b = 1.0 + (0.5 * PI * t).cos().abs();
        let c = a.abs().max(a + b);
        let h = 1.5 + a;
        (a, b, c, h)
    }
}

impl DynamicProblem for Df4 {
    fn name(&self) -> &str {
        "DF4"
    }

    fn decision_dim(&self) -> usize {
        self.n
    }

    fn objective_dim(&self) -> usize {
        2
    }

    fn bounds(&self) -> Bounds {
        Bounds::uniform(self.n, -2.0, 2.0)
    }

    fn evaluate(&self, x: &DecisionVector, t: f64) -> Result<ObjectiveVector> {
        check_input(self, x)?;
        let (a, b, c, h) = Df4::params(t);
        let link = a * (x.values[0] / c) * (x.values[0] / c);
        let g = 1.0
            + x.values[1..]
                .iter()
                .map(|&xi| (xi - link) * (xi - link))
                .sum::<f64>();
        let f1 = g * (x.values[0] - a).abs().powf(h);
        let f2 = g * (x.values[0] - a - b).abs().powf(h);
        Ok(ObjectiveVector::new(vec![f1, f2]))
    }

    fn sample_true_pf(&self, t: f64, count: usize) -> Vec<ObjectiveVector> {
        let (_, b, _, h) = Df4::params(t);
        linspace(count)
            .into_iter()
            .map(|u| {
                let s = u * b;
                ObjectiveVector::new(vec![s.powf(h), (b - s).powf(h)])
            })
            .collect()
    }

    fn true_bounds(&self, t: f64) -> (ObjectiveVector, ObjectiveVector) {
        let (_, b, _, h) = Df4::params(t);
        (
            ObjectiveVector::new(vec![0.0, 0.0]),
            ObjectiveVector::new(vec![b.powf(h), b.powf(h)]),
        )
    }
}

/// DF5: biobjective with a sinusoidal ripple on the PF whose wave number
/// changes over time.
#[derive(Debug, Clone)]
pub struct Df5 {
    n: usize,
}

impl Df5 {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        Df5 { n }
    }
}

impl DynamicProblem for Df5 {
    fn name(&self) -> &str {
        "DF5"
    }

    fn decision_dim(&self) -> usize {
        self.n
    }

    fn objective_dim(&self) -> usize {
        2
    }

    fn bounds(&self) -> Bounds {
        let mut pairs = vec![(-1.0, 1.0); self.n];
        pairs[0] = (0.0, 1.0);
        Bounds::new(pairs)
    }

    fn evaluate(&self, x: &DecisionVector, t: f64) -> Result<ObjectiveVector> {
        check_input(self, x)?;
        let big_g = (0.5 * PI * t).sin();
        let w = (10.0 * big_g).floor();
        let g = 1.0
            + x.values[1..]
                .iter()
                .map(|&xi| (xi - big_g) * (xi - big_g))
                .sum::<f64>();
        let x1 = x.values[0];
        let ripple = 0.02 * (w * PI * x1).sin();
        Ok(ObjectiveVector::new(vec![
            g * (x1 + ripple),
            g * (1.0 - x1 + ripple),
        ]))
    }

    fn sample_true_pf(&self, t: f64, count: usize) -> Vec<ObjectiveVector> {
        let big_g = (0.5 * PI * t).sin();
        let w = (10.0 * big_g).floor();
        linspace(count)
            .into_iter()
            .map(|x1| {
                let ripple = 0.02 * (w * PI * x1).sin();
                ObjectiveVector::new(vec![x1 + ripple, 1.0 - x1 + ripple])
            })
            .collect()
    }

    fn true_bounds(&self, _t: f64) -> (ObjectiveVector, ObjectiveVector) {
        (
            ObjectiveVector::new(vec![0.0, 0.0]),
            ObjectiveVector::new(vec![1.0, 1.0]),
        )
    }
}

/// FDA4: triobjective; the PS moves but the PF is always the unit-sphere
/// octant `f1² + f2² + f3² = 1`.
#[derive(Debug, Clone)]
pub struct Fda4 {
    n: usize,
}

impl Fda4 {
    pub fn new(n: usize) -> Self {
        assert!(n >= 3);
        Fda4 { n }
    }

    fn sphere_point(u: f64, v: f64) -> ObjectiveVector {
        let (su, cu) = (0.5 * PI * u).sin_cos();
        let (sv, cv) = (0.5 * PI * v).sin_cos();
        ObjectiveVector::new(vec![cu * cv, cu * sv, su])
    }
}

impl DynamicProblem for Fda4 {
    fn name(&self) -> &str {
        "FDA4"
    }

    fn decision_dim(&self) -> usize {
        self.n
    }

    fn objective_dim(&self) -> usize {
        3
    }

    fn bounds(&self) -> Bounds {
        Bounds::uniform(self.n, 0.0, 1.0)
    }

    fn evaluate(&self, x: &DecisionVector, t: f64) -> Result<ObjectiveVector> {
        check_input(self, x)?;
        let big_g = (0.5 * PI * t).sin().abs();
        let g = x.values[2..]
            .iter()
            .map(|&xi| (xi - big_g) * (xi - big_g))
            .sum::<f64>();
        let scale = 1.0 + g;
        let p = Fda4::sphere_point(x.values[0], x.values[1]);
        Ok(ObjectiveVector::new(
            p.values.iter().map(|f| scale * f).collect(),
        ))
    }

    fn sample_true_pf(&self, _t: f64, count: usize) -> Vec<ObjectiveVector> {
        // golden-ratio lattice over the (u, v) parameter square
        const GOLDEN: f64 = 0.618_033_988_749_894_9;
        let sample = |i: usize| {
            let u = (i as f64 + 0.5) / count as f64;
            let v = (i as f64 * GOLDEN).fract();
            Fda4::sphere_point(u, v)
        };
        #[cfg(feature = "parallel")]
        {
            (0..count).into_par_iter().map(sample).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..count).map(sample).collect()
        }
    }

    fn true_bounds(&self, _t: f64) -> (ObjectiveVector, ObjectiveVector) {
        (
            ObjectiveVector::new(vec![0.0, 0.0, 0.0]),
            ObjectiveVector::new(vec![1.0, 1.0, 1.0]),
        )
    }
}

/// Look up a problem by its (case-insensitive) name. `n` overrides the
/// default decision dimension (10 for biobjective, 12 for FDA4).
pub fn by_name(name: &str, n: Option<usize>) -> Result<Arc<dyn DynamicProblem>> {
    match name.to_ascii_lowercase().as_str() {
        "df1" => Ok(Arc::new(Df1::new(n.unwrap_or(10)))),
        "df4" => Ok(Arc::new(Df4::new(n.unwrap_or(10)))),
        "df5" => Ok(Arc::new(Df5::new(n.unwrap_or(10)))),
        "fda4" => Ok(Arc::new(Fda4::new(n.unwrap_or(12)))),
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

/// Names accepted by [`by_name`].
pub const PROBLEM_NAMES: [&str; 4] = ["df1", "df4", "df5", "fda4"];

/// A true-PF reference set for one environment, with its normalisation
/// context precomputed.
#[derive(Debug)]
pub struct PfReference {
    pub points: Vec<ObjectiveVector>,
    pub ideal: Vec<f64>,
    pub nadir: Vec<f64>,
    /// `points` after max–min normalisation by `(ideal, nadir)`.
    pub normalized: Vec<Vec<f64>>,
}

/// Cache of PF reference sets keyed by environment index. Built lazily on
/// first access; safe to share read-only across concurrent runs.
pub struct PfCache {
    samples: usize,
    entries: Mutex<HashMap<u32, Arc<PfReference>>>,
}

impl PfCache {
    pub fn new(samples: usize) -> Self {
        PfCache {
            samples: samples.max(1),
            entries: Mutex::new(HashMap::new()),
        }
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn get(&self, problem: &dyn DynamicProblem, ctx: &TimeContext) -> Arc<PfReference> {
        let mut entries = self.entries.lock().expect("pf cache poisoned");
        entries
            .entry(ctx.environment_index)
            .or_insert_with(|| {
                let points = problem.sample_true_pf(ctx.time, self.samples);
                let (ideal, nadir) = problem.true_bounds(ctx.time);
                let normalized = metrics::normalize(&points, &ideal.values, &nadir.values);
                Arc::new(PfReference {
                    points,
                    ideal: ideal.values,
                    nadir: nadir.values,
                    normalized,
                })
            })
            .clone()
    }
}

/// Write a PF sample as CSV, one objective vector per row.
pub fn write_pf_csv<W: Write>(
    problem: &dyn DynamicProblem,
    t: f64,
    count: usize,
    out: &mut W,
) -> std::io::Result<()> {
    for p in problem.sample_true_pf(t, count) {
        let row: Vec<String> = p.values.iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
