//! The generational optimisation loop: change detection by sentinel
//! re-evaluation, diversity-centred environmental selection over direction
//! subspaces, manifold-based reproduction in static generations, and the
//! per-direction archive feeding the change-response strategies.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::benchmarks::{DynamicProblem, PfCache};
use crate::directions::{
    associate_normalized, normalize_for_association, pbi, ReferenceDirectionSet, PBI_THETA,
};
use crate::domain::{DecisionVector, Individual, TimeContext};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::metrics;
use crate::operators::{
    fit_manifold_model, polynomial_mutation, sample_from_cluster, sbx_crossover,
};
use crate::response::{
    respond_to_change, DirectionHistory, ResponseConfig, ResponseMode, ResponseStats, Strategy,
};

/// Objective difference treated as an environmental change by the sentinels.
const CHANGE_DETECTION_TOLERANCE: f64 = 1e-12;

/// Hypervolume reference point coordinate after max–min normalisation.
const HV_REFERENCE: f64 = 1.1;

/// Reproduction operator used in static generations.
#[derive(Debug, Clone, PartialEq)]
pub enum VariationOperator {
    /// Cluster-manifold sampling: k clusters, local (M−1)-dimensional PCA
    /// manifolds extended by `extension` per side, residual Gaussian noise.
    ClusterManifold { clusters: usize, extension: f64 },
    /// SBX (index 20, rate 1.0) followed by polynomial mutation
    /// (index 20, rate 1/n).
    SbxPolynomial,
}

impl Default for VariationOperator {
    fn default() -> Self {
        VariationOperator::ClusterManifold {
            clusters: 5,
            extension: 0.25,
        }
    }
}

/// Full configuration of one optimisation run.
#[derive(Debug, Clone)]
pub struct AlgorithmConfig {
    /// Simplex-lattice resolution; the population size is the direction
    /// count it induces (99 → 100 for two objectives, 13 → 105 for three).
    pub lattice_resolution: usize,
    /// VAR lag order l.
    pub lag: usize,
    /// Success-window multiplier γ; the window spans γ·l environments.
    pub window_multiplier: usize,
    /// PCA explained-variance threshold.
    pub variance_threshold: f64,
    pub response_mode: ResponseMode,
    pub operator: VariationOperator,
    /// Number of environments to simulate.
    pub environments: usize,
    /// Generations per environment τ_t.
    pub change_frequency: u32,
    /// Severity divisor n_t.
    pub change_severity: u32,
    pub seed: u64,
}

impl AlgorithmConfig {
    /// Defaults mirroring the usual experimental protocol for a problem's
    /// objective count.
    pub fn for_problem(problem: &dyn DynamicProblem) -> Self {
        let lattice_resolution = match problem.objective_dim() {
            2 => 99, // 100 directions
            3 => 13, // 105 directions
            _ => 6,
        };
        AlgorithmConfig {
            lattice_resolution,
            lag: 5,
            window_multiplier: 1,
            variance_threshold: 0.8,
            response_mode: ResponseMode::Adaptive,
            operator: VariationOperator::default(),
            environments: 50,
            change_frequency: 10,
            change_severity: 10,
            seed: 1,
        }
    }

    fn validate(&self, problem: &dyn DynamicProblem) -> Result<()> {
        if problem.objective_dim() < 2 {
            return Err(Error::InvalidConfig(
                "problems must have at least two objectives".into(),
            ));
        }
        if self.lattice_resolution < 1 {
            return Err(Error::InvalidConfig(
                "lattice resolution must be ≥ 1".into(),
            ));
        }
        if self.lag < 1 {
            return Err(Error::InvalidConfig("lag must be ≥ 1".into()));
        }
        if self.window_multiplier < 1 {
            return Err(Error::InvalidConfig("window multiplier must be ≥ 1".into()));
        }
        if !(self.variance_threshold > 0.0 && self.variance_threshold <= 1.0) {
            return Err(Error::InvalidConfig(
                "variance threshold must be in (0, 1]".into(),
            ));
        }
        if self.environments < 1 {
            return Err(Error::InvalidConfig("need at least one environment".into()));
        }
        if self.change_frequency < 1 || self.change_severity < 1 {
            return Err(Error::InvalidConfig(
                "change frequency and severity must be ≥ 1".into(),
            ));
        }
        if let VariationOperator::ClusterManifold { clusters, .. } = self.operator {
            if clusters < 1 {
                return Err(Error::InvalidConfig("need at least one cluster".into()));
            }
        }
        Ok(())
    }
}

/// Final state of one environment: the pre-change population and its
/// indicator values against the true PF.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub environment_index: u32,
    pub igd: f64,
    pub hv: f64,
    pub wall: Duration,
    pub population: Vec<Individual>,
}

/// Per-change bookkeeping of the response machinery.
#[derive(Debug, Clone)]
pub struct ResponseDiagnostics {
    pub environment_index: u32,
    pub delta_f: f64,
    pub delta_x: f64,
    pub eta: f64,
    /// Offspring generated by prediction at this change.
    pub predicted: usize,
    /// Predicted offspring that survived into the next parent population.
    pub predicted_survivors: usize,
    /// Hypermutated offspring that survived.
    pub mutated_survivors: usize,
}

/// Everything a finished run exposes.
#[derive(Debug)]
pub struct RunOutput {
    pub records: Vec<RunRecord>,
    pub history: DirectionHistory,
    pub direction_count: usize,
    pub response_log: Vec<ResponseDiagnostics>,
}

/// Running ideal/nadir estimate over every individual evaluated in the
/// current environment; reset whenever the environment changes.
#[derive(Debug, Clone)]
struct RangeTracker {
    ideal: Vec<f64>,
    nadir: Vec<f64>,
}

impl RangeTracker {
    fn from_population(population: &[Individual]) -> Self {
        let m = population[0].objectives.dim();
        let mut tracker = RangeTracker {
            ideal: vec![f64::INFINITY; m],
            nadir: vec![f64::NEG_INFINITY; m],
        };
        for ind in population {
            tracker.update(ind);
        }
        tracker
    }

    fn update(&mut self, ind: &Individual) {
        for (j, v) in ind.objectives.values.iter().enumerate() {
            self.ideal[j] = self.ideal[j].min(*v);
            self.nadir[j] = self.nadir[j].max(*v);
        }
    }
}

/// Re-evaluate a fixed 10% sentinel subset of the population at the current
/// time; any objective moving by more than 1e-12 signals a change.
pub fn detect_change(
    population: &[Individual],
    problem: &dyn DynamicProblem,
    ctx: &TimeContext,
) -> Result<bool> {
    let n = population.len();
    let count = n.div_ceil(10);
    for s in 0..count {
        let sentinel = &population[s * 10];
        let fresh = problem.evaluate(&sentinel.decision, ctx.time)?;
        let moved = fresh
            .values
            .iter()
            .zip(sentinel.objectives.values.iter())
            .any(|(a, b)| (a - b).abs() > CHANGE_DETECTION_TOLERANCE);
        if moved {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Diversity-centred environmental selection.
///
/// Every member is associated with its nearest direction by angle; within a
/// subspace members are ordered by boundary-intersection scalarisation.
/// Layer r collects the r-th best member of every occupied subspace, and the
/// next population fills layer by layer, the final partial layer by best
/// scalarisation. Returns the selected indices into `union`.
pub fn diversity_centred_sort(
    union: &[Individual],
    dirs: &ReferenceDirectionSet,
    ideal: &[f64],
    nadir: &[f64],
    target: usize,
) -> Vec<usize> {
    if union.len() <= target {
        return (0..union.len()).collect();
    }

    let normalized: Vec<Vec<f64>> = union
        .iter()
        .map(|ind| normalize_for_association(&ind.objectives.values, ideal, nadir))
        .collect();
    let mut subspaces: Vec<Vec<usize>> = vec![Vec::new(); dirs.len()];
    let mut score = vec![0.0f64; union.len()];
    for (i, v) in normalized.iter().enumerate() {
        let d = associate_normalized(v, dirs);
        score[i] = pbi(v, dirs.direction(d), PBI_THETA);
        subspaces[d].push(i);
    }
    for members in subspaces.iter_mut() {
        members.sort_by(|&a, &b| score[a].partial_cmp(&score[b]).unwrap().then(a.cmp(&b)));
    }

    let mut selected: Vec<usize> = Vec::with_capacity(target);
    let deepest = subspaces.iter().map(|s| s.len()).max().unwrap_or(0);
    for rank in 0..deepest {
        let layer: Vec<usize> = subspaces
            .iter()
            .filter_map(|members| members.get(rank).copied())
            .collect();
        if selected.len() + layer.len() <= target {
            selected.extend(layer);
        } else {
            let mut rest = layer;
            rest.sort_by(|&a, &b| score[a].partial_cmp(&score[b]).unwrap().then(a.cmp(&b)));
            rest.truncate(target - selected.len());
            selected.extend(rest);
        }
        if selected.len() == target {
            break;
        }
    }
    selected
}

/// Store one representative per direction into the archive: the subspace best
/// by scalarisation, or the angularly nearest member when the subspace is
/// empty.
fn archive_population(
    history: &mut DirectionHistory,
    population: &[Individual],
    dirs: &ReferenceDirectionSet,
    tracker: &RangeTracker,
    env: u32,
) {
    let normalized: Vec<Vec<f64>> = population
        .iter()
        .map(|ind| {
            normalize_for_association(&ind.objectives.values, &tracker.ideal, &tracker.nadir)
        })
        .collect();
    let mut best: Vec<Option<usize>> = vec![None; dirs.len()];
    for (i, v) in normalized.iter().enumerate() {
        let d = associate_normalized(v, dirs);
        let s = pbi(v, dirs.direction(d), PBI_THETA);
        match best[d] {
            Some(cur) if pbi(&normalized[cur], dirs.direction(d), PBI_THETA) <= s => {}
            _ => best[d] = Some(i),
        }
    }
    for (d, slot) in best.iter().enumerate() {
        let rep = slot.unwrap_or_else(|| {
            let lambda = dirs.direction(d);
            let lambda_norm = norm(lambda);
            let mut chosen = 0usize;
            let mut best_cos = f64::NEG_INFINITY;
            for (i, v) in normalized.iter().enumerate() {
                let v_norm = norm(v);
                let cos = if v_norm > 0.0 {
                    dot(v, lambda) / (v_norm * lambda_norm)
                } else {
                    0.0
                };
                if cos > best_cos {
                    best_cos = cos;
                    chosen = i;
                }
            }
            chosen
        });
        history.record(d, env, population[rep].decision.clone());
    }
}

/// Create N offspring from the parent population with the configured
/// operator; all offspring are clamped to bounds and evaluated.
pub fn vary(
    population: &[Individual],
    problem: &dyn DynamicProblem,
    ctx: &TimeContext,
    operator: &VariationOperator,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Individual>> {
    let bounds = problem.bounds();
    let n_var = problem.decision_dim();
    let p_m = 1.0 / n_var as f64;

    let decisions: Vec<Vec<f64>> = match operator {
        VariationOperator::ClusterManifold {
            clusters,
            extension,
        } => {
            let points: Vec<Vec<f64>> = population
                .iter()
                .map(|ind| ind.decision.values.clone())
                .collect();
            let manifold_dim = problem.objective_dim() - 1;
            let model = fit_manifold_model(&points, manifold_dim, *clusters, *extension, rng);
            (0..population.len())
                .map(|i| {
                    let cluster = &model.clusters[model.assignment[i]];
                    if cluster.degenerate {
                        let mut values = points[i].clone();
                        polynomial_mutation(&mut values, &bounds, 20.0, p_m, rng);
                        values
                    } else {
                        sample_from_cluster(cluster, &bounds, rng)
                    }
                })
                .collect()
        }
        VariationOperator::SbxPolynomial => {
            let mut order: Vec<usize> = (0..population.len()).collect();
            order.shuffle(rng);
            let mut out: Vec<Vec<f64>> = Vec::with_capacity(population.len());
            let mut pair = 0;
            while out.len() < population.len() {
                let a = order[pair % order.len()];
                let b = order[(pair + 1) % order.len()];
                pair += 2;
                let (mut c1, mut c2) = sbx_crossover(
                    &population[a].decision.values,
                    &population[b].decision.values,
                    &bounds,
                    20.0,
                    rng,
                );
                polynomial_mutation(&mut c1, &bounds, 20.0, p_m, rng);
                out.push(c1);
                if out.len() < population.len() {
                    polynomial_mutation(&mut c2, &bounds, 20.0, p_m, rng);
                    out.push(c2);
                }
            }
            out
        }
    };

    decisions
        .into_iter()
        .map(|values| {
            let decision = DecisionVector::new(values, bounds.clone()).repaired();
            let objectives = problem.evaluate(&decision, ctx.time)?;
            Ok(Individual::new(decision, objectives, ctx.environment_index))
        })
        .collect()
}

fn reevaluate(
    population: &[Individual],
    problem: &dyn DynamicProblem,
    ctx: &TimeContext,
) -> Result<Vec<Individual>> {
    population
        .iter()
        .map(|ind| {
            let objectives = problem.evaluate(&ind.decision, ctx.time)?;
            Ok(Individual::new(
                ind.decision.clone(),
                objectives,
                ctx.environment_index,
            ))
        })
        .collect()
}

fn make_record(
    env: u32,
    population: &[Individual],
    problem: &dyn DynamicProblem,
    cfg: &AlgorithmConfig,
    cache: &PfCache,
    wall: Duration,
) -> Result<RunRecord> {
    let env_ctx = TimeContext::at_generation(
        env * cfg.change_frequency,
        cfg.change_frequency,
        cfg.change_severity,
    );
    let reference = cache.get(problem, &env_ctx);
    let objectives: Vec<_> = population.iter().map(|i| i.objectives.clone()).collect();
    let approx = metrics::normalize(&objectives, &reference.ideal, &reference.nadir);
    let igd = metrics::igd(&reference.normalized, &approx)?;
    let hv = metrics::hypervolume(&approx, &vec![HV_REFERENCE; problem.objective_dim()]);
    Ok(RunRecord {
        environment_index: env,
        igd,
        hv,
        wall,
        population: population.to_vec(),
    })
}

/// Execute one full run: per generation, detect changes, respond or vary,
/// select, and update the strategy statistics. Returns one record per
/// environment holding the population right before the following change.
pub fn run(
    problem: &dyn DynamicProblem,
    cfg: &AlgorithmConfig,
    cache: &PfCache,
) -> Result<RunOutput> {
    cfg.validate(problem)?;
    let dirs = ReferenceDirectionSet::generate(problem.objective_dim(), cfg.lattice_resolution)?;
    let n = dirs.len();
    let response_cfg = ResponseConfig {
        lag: cfg.lag,
        variance_threshold: cfg.variance_threshold,
        mode: cfg.response_mode,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ctx = TimeContext::initial(cfg.change_frequency, cfg.change_severity);
    let bounds = problem.bounds();

    let mut population: Vec<Individual> = (0..n)
        .map(|_| {
            let values: Vec<f64> = bounds
                .pairs()
                .iter()
                .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect();
            let decision = DecisionVector::new(values, bounds.clone());
            let objectives = problem.evaluate(&decision, ctx.time)?;
            Ok(Individual::new(decision, objectives, 0))
        })
        .collect::<Result<_>>()?;

    let mut tracker = RangeTracker::from_population(&population);
    let mut history = DirectionHistory::new(n);
    let mut stats = ResponseStats::new(n, (cfg.window_multiplier * cfg.lag).max(1));
    let mut records: Vec<RunRecord> = Vec::with_capacity(cfg.environments);
    let mut response_log: Vec<ResponseDiagnostics> = Vec::new();

    let total_generations = cfg.environments as u32 * cfg.change_frequency;
    let mut prev_env = 0u32;
    let mut env_started = Instant::now();

    for _ in 1..total_generations {
        ctx = ctx.advanced();
        let boundary = ctx.environment_index != prev_env;
        if boundary {
            records.push(make_record(
                prev_env,
                &population,
                problem,
                cfg,
                cache,
                env_started.elapsed(),
            )?);
            env_started = Instant::now();
        }

        let changed = detect_change(&population, problem, &ctx)?;
        if changed {
            archive_population(&mut history, &population, &dirs, &tracker, prev_env);
            let reevaled = reevaluate(&population, problem, &ctx)?;
            let response = respond_to_change(
                &population,
                &reevaled,
                &history,
                &stats,
                &dirs,
                problem,
                &ctx,
                &response_cfg,
                &mut rng,
            )?;
            let mut union = reevaled;
            union.extend(response.offspring);
            tracker = RangeTracker::from_population(&union);
            let selected = diversity_centred_sort(&union, &dirs, &tracker.ideal, &tracker.nadir, n);
            let mut survived = vec![false; n];
            for &idx in &selected {
                if idx >= n {
                    survived[idx - n] = true;
                }
            }
            population = selected.iter().map(|&i| union[i].clone()).collect();
            for (i, (&strategy, &ok)) in response.strategies.iter().zip(survived.iter()).enumerate()
            {
                stats.record(i, ctx.environment_index, strategy, ok);
            }
            let predicted = response
                .strategies
                .iter()
                .filter(|s| **s == Strategy::Prediction)
                .count();
            response_log.push(ResponseDiagnostics {
                environment_index: ctx.environment_index,
                delta_f: response.delta_f,
                delta_x: response.delta_x,
                eta: response.eta,
                predicted,
                predicted_survivors: (0..n)
                    .filter(|&i| survived[i] && response.strategies[i] == Strategy::Prediction)
                    .count(),
                mutated_survivors: (0..n)
                    .filter(|&i| survived[i] && response.strategies[i] == Strategy::Mutation)
                    .count(),
            });
        } else {
            let offspring = vary(&population, problem, &ctx, &cfg.operator, &mut rng)?;
            for q in &offspring {
                tracker.update(q);
            }
            let mut union = population;
            union.extend(offspring);
            let selected = diversity_centred_sort(&union, &dirs, &tracker.ideal, &tracker.nadir, n);
            population = selected.iter().map(|&i| union[i].clone()).collect();
        }
        debug_assert_eq!(population.len(), n);

        if boundary {
            prev_env = ctx.environment_index;
        }
    }

    records.push(make_record(
        prev_env,
        &population,
        problem,
        cfg,
        cache,
        env_started.elapsed(),
    )?);

    Ok(RunOutput {
        records,
        history,
        direction_count: n,
        response_log,
    })
}
