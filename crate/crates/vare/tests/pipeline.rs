//! End-to-end runs of the full optimiser on the dynamic benchmarks.

use vare::benchmarks::{by_name, PfCache};
use vare::engine::{run, AlgorithmConfig, VariationOperator};
use vare::metrics;
use vare::response::ResponseMode;

fn migd_of(records: &[vare::engine::RunRecord]) -> f64 {
    records.iter().map(|r| r.igd).sum::<f64>() / records.len() as f64
}

#[test]
fn df4_default_run_tracks_the_front() {
    let problem = by_name("df4", None).unwrap();
    let cfg = AlgorithmConfig {
        environments: 30,
        ..AlgorithmConfig::for_problem(problem.as_ref())
    };
    let cache = PfCache::new(2_000);
    let out = run(problem.as_ref(), &cfg, &cache).unwrap();
    assert_eq!(out.records.len(), 30);
    let migd = migd_of(&out.records);
    println!("df4 probe migd = {migd:.5}");
    assert!(
        migd < 0.2,
        "default run should track DF4 reasonably, migd = {migd}"
    );
}

#[test]
fn population_size_invariant_holds_every_environment() {
    let problem = by_name("df1", None).unwrap();
    let mut cfg = AlgorithmConfig::for_problem(problem.as_ref());
    cfg.environments = 6;
    cfg.lattice_resolution = 29;
    let cache = PfCache::new(500);
    let out = run(problem.as_ref(), &cfg, &cache).unwrap();
    for record in &out.records {
        assert_eq!(record.population.len(), out.direction_count);
        assert!(record.igd >= 0.0);
        assert!(record.hv >= 0.0);
        for ind in &record.population {
            assert_eq!(ind.eval_env, record.environment_index);
            assert!(ind.decision.in_bounds());
        }
    }
}

#[test]
fn response_modes_all_complete() {
    let problem = by_name("df5", None).unwrap();
    let cache = PfCache::new(500);
    for mode in [
        ResponseMode::Adaptive,
        ResponseMode::PredictionOnly,
        ResponseMode::MutationOnly,
    ] {
        let mut cfg = AlgorithmConfig::for_problem(problem.as_ref());
        cfg.environments = 5;
        cfg.lattice_resolution = 19;
        cfg.response_mode = mode;
        let out = run(problem.as_ref(), &cfg, &cache).unwrap();
        assert_eq!(out.records.len(), 5);
    }
}

#[test]
fn sbx_operator_route_completes() {
    let problem = by_name("df1", None).unwrap();
    let mut cfg = AlgorithmConfig::for_problem(problem.as_ref());
    cfg.environments = 4;
    cfg.lattice_resolution = 19;
    cfg.operator = VariationOperator::SbxPolynomial;
    let cache = PfCache::new(500);
    let out = run(problem.as_ref(), &cfg, &cache).unwrap();
    assert_eq!(out.records.len(), 4);
}

#[test]
fn metric_aggregation_matches_records() {
    let problem = by_name("df1", None).unwrap();
    let mut cfg = AlgorithmConfig::for_problem(problem.as_ref());
    cfg.environments = 4;
    cfg.lattice_resolution = 19;
    let cache = PfCache::new(500);
    let out = run(problem.as_ref(), &cfg, &cache).unwrap();
    let records: Vec<metrics::MetricRecord> = out
        .records
        .iter()
        .map(|r| metrics::MetricRecord {
            environment_index: r.environment_index,
            igd: r.igd,
            hv: r.hv,
            wall: r.wall,
        })
        .collect();
    let (migd, mhv) = metrics::aggregate(&records);
    assert!((migd - migd_of(&out.records)).abs() < 1e-12);
    assert!(mhv > 0.0);
}
