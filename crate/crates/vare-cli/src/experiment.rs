//! Experiment execution: seeded independent runs, plain-text result files,
//! parameter sweeps and pairwise comparison reports.
//!
//! File layout per experiment directory:
//! - `trace.csv`    — `run,environment,igd,hv`, one row per (run, environment);
//!   byte-reproducible for a fixed configuration.
//! - `timings.csv`  — `run,environment,wall_ms` (wall time is not reproducible
//!   and therefore lives outside the trace).
//! - `summary.json` — per-run MIGD/MHV plus means and standard deviations.
//! - `config.json`  — echo of the configuration for provenance.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use vare::benchmarks::{write_pf_csv, PfCache};
use vare::domain::TimeContext;
use vare::engine::run;
use vare::metrics::{aggregate, rank_algorithms, MetricRecord};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::stats::{wilcoxon_rank_sum, RankSumTest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run: usize,
    pub seed: u64,
    pub migd: f64,
    pub mhv: f64,
    pub wall_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub migd_mean: f64,
    pub migd_std: f64,
    pub mhv_mean: f64,
    pub mhv_std: f64,
    pub total_runtime_ms: u128,
    pub per_run: Vec<RunSummary>,
}

#[derive(Debug, Clone)]
struct RunTrace {
    records: Vec<MetricRecord>,
    summary: RunSummary,
}

/// Execute all runs of an experiment and write the result files into
/// `cfg.out_dir`. Returns the cross-run summary.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    cfg.validate()?;
    let problem = cfg.problem()?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| HarnessError::io(&cfg.out_dir, e))?;

    let started = Instant::now();
    let cache = PfCache::new(cfg.pf_samples);

    let workers = if cfg.workers == 0 {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
            .min(cfg.runs)
    } else {
        cfg.workers.min(cfg.runs)
    };

    let traces: Mutex<Vec<Option<RunTrace>>> = Mutex::new(vec![None; cfg.runs]);
    let next: AtomicUsize = AtomicUsize::new(0);
    let failure: Mutex<Option<HarnessError>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for _ in 0..workers.max(1) {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= cfg.runs {
                    break;
                }
                let algo_cfg = cfg.algorithm_config(problem.as_ref(), index);
                let run_started = Instant::now();
                match run(problem.as_ref(), &algo_cfg, &cache) {
                    Ok(output) => {
                        let records: Vec<MetricRecord> = output
                            .records
                            .iter()
                            .map(|r| MetricRecord {
                                environment_index: r.environment_index,
                                igd: r.igd,
                                hv: r.hv,
                                wall: r.wall,
                            })
                            .collect();
                        let (migd, mhv) = aggregate(&records);
                        let trace = RunTrace {
                            records,
                            summary: RunSummary {
                                run: index,
                                seed: algo_cfg.seed,
                                migd,
                                mhv,
                                wall_ms: run_started.elapsed().as_millis(),
                            },
                        };
                        traces.lock().unwrap()[index] = Some(trace);
                    }
                    Err(e) => {
                        let mut slot = failure.lock().unwrap();
                        if slot.is_none() {
                            *slot = Some(HarnessError::Core(e));
                        }
                        break;
                    }
                }
            });
        }
    });

    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let traces: Vec<RunTrace> = traces
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|t| t.expect("all runs completed"))
        .collect();

    write_trace_csv(&cfg.out_dir.join("trace.csv"), &traces)?;
    write_timings_csv(&cfg.out_dir.join("timings.csv"), &traces)?;

    let per_run: Vec<RunSummary> = traces.iter().map(|t| t.summary.clone()).collect();
    let migds: Vec<f64> = per_run.iter().map(|r| r.migd).collect();
    let mhvs: Vec<f64> = per_run.iter().map(|r| r.mhv).collect();
    let summary = ExperimentSummary {
        migd_mean: mean(&migds),
        migd_std: sample_std(&migds),
        mhv_mean: mean(&mhvs),
        mhv_std: sample_std(&mhvs),
        total_runtime_ms: started.elapsed().as_millis(),
        per_run,
    };

    write_json(&cfg.out_dir.join("summary.json"), &summary)?;
    write_json(&cfg.out_dir.join("config.json"), cfg)?;

    if cfg.export_pf {
        export_pf_sets(cfg)?;
    }

    Ok(summary)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

fn write_trace_csv(path: &Path, traces: &[RunTrace]) -> Result<()> {
    let mut out = String::from("run,environment,igd,hv\n");
    for trace in traces {
        for rec in &trace.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                trace.summary.run, rec.environment_index, rec.igd, rec.hv
            ));
        }
    }
    fs::write(path, out).map_err(|e| HarnessError::io(path, e))
}

fn write_timings_csv(path: &Path, traces: &[RunTrace]) -> Result<()> {
    let mut out = String::from("run,environment,wall_ms\n");
    for trace in traces {
        for rec in &trace.records {
            out.push_str(&format!(
                "{},{},{}\n",
                trace.summary.run,
                rec.environment_index,
                rec.wall.as_millis()
            ));
        }
    }
    fs::write(path, out).map_err(|e| HarnessError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let body = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, body + "\n").map_err(|e| HarnessError::io(path, e))
}

fn export_pf_sets(cfg: &ExperimentConfig) -> Result<()> {
    let problem = cfg.problem()?;
    for env in 0..cfg.environments {
        let ctx =
            TimeContext::at_generation(env as u32 * cfg.frequency, cfg.frequency, cfg.severity);
        let path = cfg.out_dir.join(format!("pf_env{env}.csv"));
        let mut file = fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
        write_pf_csv(problem.as_ref(), ctx.time, cfg.pf_samples, &mut file)
            .map_err(|e| HarnessError::io(&path, e))?;
        file.flush().map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok(())
}

/// Load a `summary.json` written by [`run_experiment`].
pub fn load_summary(dir: &Path) -> Result<ExperimentSummary> {
    let path = dir.join("summary.json");
    let body = fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
    serde_json::from_str(&body).map_err(|e| HarnessError::Malformed {
        path,
        message: e.to_string(),
    })
}

/// Verdict of a pairwise comparison on MIGD at α = 0.05.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ABetter,
    BBetter,
    Equivalent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub migd_test: RankSumTest,
    pub verdict: Verdict,
    pub migd_means: (f64, f64),
    pub mhv_means: (f64, f64),
    /// Nondominated ranks of the paired (MIGD, MHV) scores.
    pub ranks: (usize, usize),
}

/// Compare two experiments by their per-run MIGD values (rank-sum test at
/// α = 0.05) and by nondominated ranking of the (MIGD, MHV) pairs.
pub fn compare(a: &ExperimentSummary, b: &ExperimentSummary) -> Result<ComparisonReport> {
    let migd_a: Vec<f64> = a.per_run.iter().map(|r| r.migd).collect();
    let migd_b: Vec<f64> = b.per_run.iter().map(|r| r.migd).collect();
    let migd_test = wilcoxon_rank_sum(&migd_a, &migd_b)?;

    let verdict = if !migd_test.significant_at(0.05) {
        Verdict::Equivalent
    } else if a.migd_mean < b.migd_mean {
        Verdict::ABetter
    } else {
        Verdict::BBetter
    };

    let ranks = rank_algorithms(&[(a.migd_mean, a.mhv_mean), (b.migd_mean, b.mhv_mean)]);
    Ok(ComparisonReport {
        migd_test,
        verdict,
        migd_means: (a.migd_mean, b.migd_mean),
        mhv_means: (a.mhv_mean, b.mhv_mean),
        ranks: (ranks[0], ranks[1]),
    })
}

/// Swept parameter of [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    Lag,
    Gamma,
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepParameter::Lag => f.write_str("lag"),
            SweepParameter::Gamma => f.write_str("gamma"),
        }
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lag" | "l" => Ok(SweepParameter::Lag),
            "gamma" | "g" => Ok(SweepParameter::Gamma),
            other => Err(format!("unknown sweep parameter '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: usize,
    pub mhv_mean: f64,
    pub mhv_std: f64,
}

/// Run one experiment per parameter value (into per-value subdirectories of
/// `cfg.out_dir`) and write `sweep.csv` with one row per value.
pub fn sweep(
    cfg: &ExperimentConfig,
    parameter: SweepParameter,
    values: &[usize],
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(HarnessError::InvalidConfig(
            "sweep needs at least one value".into(),
        ));
    }
    fs::create_dir_all(&cfg.out_dir).map_err(|e| HarnessError::io(&cfg.out_dir, e))?;
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let mut sub = cfg.clone();
        match parameter {
            SweepParameter::Lag => sub.lag = value,
            SweepParameter::Gamma => sub.gamma = value,
        }
        sub.out_dir = cfg.out_dir.join(format!("{parameter}_{value}"));
        let summary = run_experiment(&sub)?;
        rows.push(SweepRow {
            value,
            mhv_mean: summary.mhv_mean,
            mhv_std: summary.mhv_std,
        });
    }
    let mut out = String::from("value,mhv_mean,mhv_std\n");
    for row in &rows {
        out.push_str(&format!("{},{},{}\n", row.value, row.mhv_mean, row.mhv_std));
    }
    let path = cfg.out_dir.join("sweep.csv");
    fs::write(&path, out).map_err(|e| HarnessError::io(&path, e))?;
    Ok(rows)
}
