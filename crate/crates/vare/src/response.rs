//! Change-response strategies for environmental changes: per-direction
//! population prediction (PCA + VAR forecast of archived solutions) and
//! environment-aware hypermutation whose distribution index shrinks as the
//! measured severity of change grows. A per-direction probability, learned
//! from recent success rates, picks between the two at every change.

use std::collections::VecDeque;

use rand::Rng;

use crate::benchmarks::DynamicProblem;
use crate::directions::{
    associate_normalized, normalize_for_association, pbi, ReferenceDirectionSet, PBI_THETA,
};
use crate::domain::{DecisionVector, Individual, TimeContext};
use crate::error::{Error, Result};
use crate::forecast::{fit_pca, fit_var, forecast_one_step, project, reconstruct};
use crate::linalg::{dot, norm};
use crate::operators::polynomial_mutation;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Denominator guard of the relative-difference severities.
pub const SEVERITY_EPSILON: f64 = 1e-6;

/// The strategy that produced an offspring at a change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Prediction,
    Mutation,
}

/// Per-direction archive of solutions, one entry per completed environment,
/// ordered by environment index.
#[derive(Debug, Clone)]
pub struct DirectionHistory {
    entries: Vec<Vec<HistoryEntry>>,
}

#[derive(Debug, Clone)]
struct HistoryEntry {
    env: u32,
    decision: DecisionVector,
}

impl DirectionHistory {
    pub fn new(direction_count: usize) -> Self {
        DirectionHistory {
            entries: vec![Vec::new(); direction_count],
        }
    }

    pub fn direction_count(&self) -> usize {
        self.entries.len()
    }

    /// Store the representative of `direction` for environment `env`.
    /// Recording the same environment twice replaces the earlier entry.
    pub fn record(&mut self, direction: usize, env: u32, decision: DecisionVector) {
        let series = &mut self.entries[direction];
        if let Some(last) = series.last_mut() {
            debug_assert!(last.env <= env, "environments must be recorded in order");
            if last.env == env {
                last.decision = decision;
                return;
            }
        }
        series.push(HistoryEntry { env, decision });
    }

    pub fn len(&self, direction: usize) -> usize {
        self.entries[direction].len()
    }

    pub fn is_empty(&self, direction: usize) -> bool {
        self.entries[direction].is_empty()
    }

    /// Most recently archived solution for a direction.
    pub fn latest(&self, direction: usize) -> Option<&DecisionVector> {
        self.entries[direction].last().map(|e| &e.decision)
    }

    /// Archived decision values in environment order.
    pub fn series_values(&self, direction: usize) -> Vec<Vec<f64>> {
        self.entries[direction]
            .iter()
            .map(|e| e.decision.values.clone())
            .collect()
    }

    pub fn decisions(&self, direction: usize) -> impl Iterator<Item = &DecisionVector> {
        self.entries[direction].iter().map(|e| &e.decision)
    }
}

/// Sliding-window success counts of both strategies, per direction. A cell
/// records one attempt (and its outcome) at one environmental change; cells
/// older than the window length are dropped.
#[derive(Debug, Clone)]
pub struct ResponseStats {
    window: usize,
    cells: Vec<VecDeque<StatCell>>,
}

#[derive(Debug, Clone, Copy)]
struct StatCell {
    env: u32,
    strategy: Strategy,
    success: bool,
}

impl ResponseStats {
    pub fn new(direction_count: usize, window: usize) -> Self {
        assert!(window >= 1);
        ResponseStats {
            window,
            cells: vec![VecDeque::new(); direction_count],
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Record the outcome of one change-response attempt.
    pub fn record(&mut self, direction: usize, env: u32, strategy: Strategy, success: bool) {
        let window = self.window as u32;
        let cells = &mut self.cells[direction];
        cells.push_back(StatCell {
            env,
            strategy,
            success,
        });
        while let Some(front) = cells.front() {
            if front.env + window <= env {
                cells.pop_front();
            } else {
                break;
            }
        }
    }

    /// Success rates `(ρ_prediction, ρ_mutation)` over the window; a strategy
    /// with no attempts rates 0.
    pub fn rates(&self, direction: usize) -> (f64, f64) {
        let mut attempts = [0usize; 2];
        let mut successes = [0usize; 2];
        for cell in &self.cells[direction] {
            let s = match cell.strategy {
                Strategy::Prediction => 0,
                Strategy::Mutation => 1,
            };
            attempts[s] += 1;
            if cell.success {
                successes[s] += 1;
            }
        }
        let rate = |s: usize| {
            if attempts[s] == 0 {
                0.0
            } else {
                successes[s] as f64 / attempts[s] as f64
            }
        };
        (rate(0), rate(1))
    }

    /// Attempt counts `(prediction, mutation)` currently inside the window.
    pub fn attempt_counts(&self, direction: usize) -> (usize, usize) {
        let mut counts = (0usize, 0usize);
        for cell in &self.cells[direction] {
            match cell.strategy {
                Strategy::Prediction => counts.0 += 1,
                Strategy::Mutation => counts.1 += 1,
            }
        }
        counts
    }

    /// Probability of choosing prediction for this direction:
    /// `ρ_p / (ρ_p + ρ_m)`, or 0 when both rates are 0.
    pub fn pi(&self, direction: usize) -> f64 {
        let (rho_p, rho_m) = self.rates(direction);
        if rho_p + rho_m == 0.0 {
            0.0
        } else {
            rho_p / (rho_p + rho_m)
        }
    }
}

/// Probability of selecting prediction for direction `i` from the recorded
/// success rates.
pub fn update_pi(stats: &ResponseStats, i: usize) -> f64 {
    stats.pi(i)
}

/// Predict the next solution for direction `i` by compressing its archived
/// trajectory with PCA, fitting a VAR(`lag`) model in the latent space and
/// reconstructing the one-step forecast, clamped to bounds.
///
/// Needs at least `lag + 2` archived environments.
pub fn var_predict(
    history: &DirectionHistory,
    i: usize,
    lag: usize,
    variance_threshold: f64,
) -> Result<DecisionVector> {
    let series = history.series_values(i);
    if series.len() < lag + 2 {
        return Err(Error::InsufficientHistory {
            direction: i,
            have: series.len(),
            need: lag + 2,
        });
    }
    let basis = fit_pca(&series, variance_threshold)?;
    let latent: Vec<Vec<f64>> = series.iter().map(|x| project(&basis, x)).collect();
    let coeffs = fit_var(&latent, lag)?;
    let recent: Vec<Vec<f64>> = (1..=lag)
        .map(|m| latent[latent.len() - m].clone())
        .collect();
    let forecast = forecast_one_step(&coeffs, &recent)?;
    let values = reconstruct(&basis, &forecast);
    let bounds = history
        .latest(i)
        .expect("nonempty history checked above")
        .bounds
        .clone();
    Ok(DecisionVector::new(values, bounds).repaired())
}

/// Average relative objective difference between a population and its
/// re-evaluation in the new environment.
pub fn severity_objective(p_old: &[Individual], p_reeval: &[Individual]) -> f64 {
    debug_assert_eq!(p_old.len(), p_reeval.len());
    if p_old.is_empty() {
        return 0.0;
    }
    let m = p_old[0].objectives.dim();
    let mut total = 0.0;
    for (old, new) in p_old.iter().zip(p_reeval.iter()) {
        debug_assert_eq!(old.decision, new.decision);
        for (f_old, f_new) in old
            .objectives
            .values
            .iter()
            .zip(new.objectives.values.iter())
        {
            total += ((f_new - f_old) / (f_old.abs() + SEVERITY_EPSILON)).abs();
        }
    }
    total / (m * p_old.len()) as f64
}

/// Ideal/nadir pairs used to associate both populations when measuring
/// decision-space severity. Each population is normalised by its own range,
/// so a uniform objective shift leaves associations unchanged.
#[derive(Debug, Clone)]
pub struct SeverityNormalization {
    pub old_ideal: Vec<f64>,
    pub old_nadir: Vec<f64>,
    pub new_ideal: Vec<f64>,
    pub new_nadir: Vec<f64>,
}

impl SeverityNormalization {
    pub fn from_populations(p_old: &[Individual], p_reeval: &[Individual]) -> Self {
        let (old_ideal, old_nadir) = objective_range(p_old);
        let (new_ideal, new_nadir) = objective_range(p_reeval);
        SeverityNormalization {
            old_ideal,
            old_nadir,
            new_ideal,
            new_nadir,
        }
    }
}

fn objective_range(population: &[Individual]) -> (Vec<f64>, Vec<f64>) {
    let m = population[0].objectives.dim();
    let mut ideal = vec![f64::INFINITY; m];
    let mut nadir = vec![f64::NEG_INFINITY; m];
    for ind in population {
        for (j, v) in ind.objectives.values.iter().enumerate() {
            ideal[j] = ideal[j].min(*v);
            nadir[j] = nadir[j].max(*v);
        }
    }
    (ideal, nadir)
}

/// Average relative decision difference between each old member and its best
/// partner among the re-evaluated members sharing its reference direction.
/// "Best" is the smallest boundary-intersection scalarisation along the
/// direction; a direction with no re-evaluated member falls back to the
/// angularly nearest one.
pub fn severity_decision(
    p_old: &[Individual],
    p_reeval: &[Individual],
    dirs: &ReferenceDirectionSet,
    ctx: &SeverityNormalization,
) -> f64 {
    debug_assert_eq!(p_old.len(), p_reeval.len());
    if p_old.is_empty() {
        return 0.0;
    }
    let n = p_old[0].decision.dim();

    let re_norm: Vec<Vec<f64>> = p_reeval
        .iter()
        .map(|ind| {
            normalize_for_association(&ind.objectives.values, &ctx.new_ideal, &ctx.new_nadir)
        })
        .collect();
    let re_assoc: Vec<usize> = re_norm
        .iter()
        .map(|v| associate_normalized(v, dirs))
        .collect();

    // convergence-best re-evaluated member of each occupied direction
    let mut best_re: Vec<Option<usize>> = vec![None; dirs.len()];
    for (j, &d) in re_assoc.iter().enumerate() {
        let score = pbi(&re_norm[j], dirs.direction(d), PBI_THETA);
        match best_re[d] {
            Some(cur) if pbi(&re_norm[cur], dirs.direction(d), PBI_THETA) <= score => {}
            _ => best_re[d] = Some(j),
        }
    }

    let nearest_to = |d: usize| -> usize {
        let lambda = dirs.direction(d);
        let lambda_norm = norm(lambda);
        let mut best = 0usize;
        let mut best_cos = f64::NEG_INFINITY;
        for (j, v) in re_norm.iter().enumerate() {
            let v_norm = norm(v);
            let cos = if v_norm > 0.0 {
                dot(v, lambda) / (v_norm * lambda_norm)
            } else {
                0.0
            };
            if cos > best_cos {
                best_cos = cos;
                best = j;
            }
        }
        best
    };

    let mut total = 0.0;
    for old in p_old {
        let v = normalize_for_association(&old.objectives.values, &ctx.old_ideal, &ctx.old_nadir);
        let d = associate_normalized(&v, dirs);
        let partner = best_re[d].unwrap_or_else(|| nearest_to(d));
        for (x_new, x_old) in p_reeval[partner]
            .decision
            .values
            .iter()
            .zip(old.decision.values.iter())
        {
            total += ((x_new - x_old) / (x_old.abs() + SEVERITY_EPSILON)).abs();
        }
    }
    total / (p_old.len() * n) as f64
}

/// Polynomial-mutation distribution index from the measured severities:
/// `η = 20 · max(e^{−(Δ_F + Δ_X)}, 0.1)`, restricted to [2, 20].
pub fn mutation_index(delta_f: f64, delta_x: f64) -> f64 {
    debug_assert!(delta_f >= 0.0 && delta_x >= 0.0);
    20.0 * (-(delta_f + delta_x)).exp().max(0.1)
}

/// Hypermutate the most recent archived solution of direction `i` with
/// distribution index `eta` and per-variable probability `1/n`.
pub fn eah_mutate(
    history: &DirectionHistory,
    i: usize,
    eta: f64,
    rng: &mut impl Rng,
) -> Result<DecisionVector> {
    let base = history
        .latest(i)
        .ok_or(Error::EmptyHistory { direction: i })?;
    Ok(mutate_decision(base, eta, rng))
}

fn mutate_decision(base: &DecisionVector, eta: f64, rng: &mut impl Rng) -> DecisionVector {
    let mut out = base.clone();
    let p_m = 1.0 / out.dim() as f64;
    let bounds = out.bounds.clone();
    polynomial_mutation(&mut out.values, &bounds, eta, p_m, rng);
    out
}

/// How strategies are chosen at a change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseMode {
    /// Pick prediction with probability π_i, hypermutation otherwise.
    Adaptive,
    /// Always attempt prediction (hypermutation only as fallback).
    PredictionOnly,
    /// Always hypermutate.
    MutationOnly,
}

#[derive(Debug, Clone)]
pub struct ResponseConfig {
    pub lag: usize,
    pub variance_threshold: f64,
    pub mode: ResponseMode,
}

/// Outcome of one change response: the offspring population, the strategy
/// that actually produced each member, and the measured severities.
#[derive(Debug, Clone)]
pub struct ChangeResponse {
    pub offspring: Vec<Individual>,
    pub strategies: Vec<Strategy>,
    pub delta_f: f64,
    pub delta_x: f64,
    pub eta: f64,
}

/// Generate one offspring per reference direction in response to a detected
/// change. Severities are computed once from the re-evaluated population;
/// prediction attempts that fail their history precondition fall back to
/// hypermutation and are attributed to the mutation strategy. Every offspring
/// is evaluated in the new environment.
#[allow(clippy::too_many_arguments)]
pub fn respond_to_change(
    p_old: &[Individual],
    p_reeval: &[Individual],
    history: &DirectionHistory,
    stats: &ResponseStats,
    dirs: &ReferenceDirectionSet,
    problem: &dyn DynamicProblem,
    ctx: &TimeContext,
    cfg: &ResponseConfig,
    rng: &mut impl Rng,
) -> Result<ChangeResponse> {
    let n_dirs = dirs.len();

    let severity_ctx = SeverityNormalization::from_populations(p_old, p_reeval);
    let delta_f = severity_objective(p_old, p_reeval);
    let delta_x = severity_decision(p_old, p_reeval, dirs, &severity_ctx);
    let eta = mutation_index(delta_f, delta_x);

    // all strategy draws happen before any mutation consumes the stream, so
    // the prediction fan-out below cannot perturb rng ordering
    let try_prediction: Vec<bool> = match cfg.mode {
        ResponseMode::Adaptive => (0..n_dirs)
            .map(|i| {
                let r = rng.random::<f64>();
                if stats.pi(i) > r {
                    return true;
                }
                // success rates can only move off zero once prediction has
                // been attempted; probe an untried direction as soon as its
                // archive can support a fit
                let (prediction_attempts, _) = stats.attempt_counts(i);
                prediction_attempts == 0 && history.len(i) >= cfg.lag + 2
            })
            .collect(),
        ResponseMode::PredictionOnly => vec![true; n_dirs],
        ResponseMode::MutationOnly => vec![false; n_dirs],
    };

    let predict = |i: usize| -> Option<DecisionVector> {
        if try_prediction[i] {
            var_predict(history, i, cfg.lag, cfg.variance_threshold).ok()
        } else {
            None
        }
    };
    #[cfg(feature = "parallel")]
    let predictions: Vec<Option<DecisionVector>> =
        (0..n_dirs).into_par_iter().map(predict).collect();
    #[cfg(not(feature = "parallel"))]
    let predictions: Vec<Option<DecisionVector>> = (0..n_dirs).map(predict).collect();

    // fallback base when a direction has no archive: the re-evaluated member
    // nearest to the direction by angle
    let re_norm: Vec<Vec<f64>> = p_reeval
        .iter()
        .map(|ind| {
            normalize_for_association(
                &ind.objectives.values,
                &severity_ctx.new_ideal,
                &severity_ctx.new_nadir,
            )
        })
        .collect();
    let fallback_base = |d: usize| -> &DecisionVector {
        let lambda = dirs.direction(d);
        let lambda_norm = norm(lambda);
        let mut best = 0usize;
        let mut best_cos = f64::NEG_INFINITY;
        for (j, v) in re_norm.iter().enumerate() {
            let v_norm = norm(v);
            let cos = if v_norm > 0.0 {
                dot(v, lambda) / (v_norm * lambda_norm)
            } else {
                0.0
            };
            if cos > best_cos {
                best_cos = cos;
                best = j;
            }
        }
        &p_reeval[best].decision
    };

    let mut decisions: Vec<DecisionVector> = Vec::with_capacity(n_dirs);
    let mut strategies: Vec<Strategy> = Vec::with_capacity(n_dirs);
    for (i, prediction) in predictions.into_iter().enumerate() {
        match prediction {
            Some(q) => {
                decisions.push(q);
                strategies.push(Strategy::Prediction);
            }
            None => {
                let mutated = match history.latest(i) {
                    Some(base) => mutate_decision(base, eta, rng),
                    None => mutate_decision(fallback_base(i), eta, rng),
                };
                decisions.push(mutated);
                strategies.push(Strategy::Mutation);
            }
        }
    }

    let offspring: Vec<Individual> = decisions
        .into_iter()
        .map(|decision| {
            let objectives = problem.evaluate(&decision, ctx.time)?;
            Ok(Individual::new(decision, objectives, ctx.environment_index))
        })
        .collect::<Result<_>>()?;

    Ok(ChangeResponse {
        offspring,
        strategies,
        delta_f,
        delta_x,
        eta,
    })
}
