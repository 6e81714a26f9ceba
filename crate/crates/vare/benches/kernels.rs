//! Benchmarks of the data-parallel kernels. Build with the default features
//! for the rayon lanes, or `--no-default-features` for the sequential build:
//!
//! ```text
//! cargo bench -p vare
//! cargo bench -p vare --no-default-features
//! ```
//!
//! The `igd/sequential-baseline` entry is an inline single-threaded
//! implementation, so one run already shows the speedup of the default lane.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vare::benchmarks::{by_name, PfCache};
use vare::directions::ReferenceDirectionSet;
use vare::domain::{DecisionVector, Individual, ObjectiveVector, TimeContext};
use vare::engine::{diversity_centred_sort, run, AlgorithmConfig};
use vare::forecast::{fit_pca, fit_var, forecast_one_step, project};
use vare::metrics::{hypervolume, igd};

fn random_front(rng: &mut ChaCha8Rng, count: usize, m: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..m).map(|_| rng.random::<f64>()).collect())
        .collect()
}

fn bench_igd(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let reference = random_front(&mut rng, 10_000, 2);
    let approximation = random_front(&mut rng, 100, 2);

    let mut group = c.benchmark_group("igd");
    group.bench_function("10000x100", |b| {
        b.iter(|| igd(black_box(&reference), black_box(&approximation)).unwrap())
    });
    group.bench_function("sequential-baseline", |b| {
        b.iter(|| {
            let total: f64 = reference
                .iter()
                .map(|r| {
                    approximation
                        .iter()
                        .map(|a| {
                            r.iter()
                                .zip(a.iter())
                                .map(|(x, y)| (x - y) * (x - y))
                                .sum::<f64>()
                        })
                        .fold(f64::INFINITY, f64::min)
                        .sqrt()
                })
                .sum();
            black_box(total / reference.len() as f64)
        })
    });
    group.finish();
}

fn bench_hypervolume(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let front_2d = random_front(&mut rng, 100, 2);
    let front_3d = random_front(&mut rng, 105, 3);

    let mut group = c.benchmark_group("hypervolume");
    group.bench_function("2d-100", |b| {
        b.iter(|| hypervolume(black_box(&front_2d), &[1.1, 1.1]))
    });
    group.bench_function("3d-105", |b| {
        b.iter(|| hypervolume(black_box(&front_3d), &[1.1, 1.1, 1.1]))
    });
    group.finish();
}

fn bench_forecast_pipeline(c: &mut Criterion) {
    // a drifting 10-dimensional history, as archived per direction
    let series: Vec<Vec<f64>> = (0..50)
        .map(|t| {
            let s = t as f64 / 49.0;
            (0..10).map(|d| 0.3 * s + 0.01 * d as f64).collect()
        })
        .collect();

    c.bench_function("pca-var-forecast/50x10", |b| {
        b.iter(|| {
            let basis = fit_pca(black_box(&series), 0.8).unwrap();
            let latent: Vec<Vec<f64>> = series.iter().map(|x| project(&basis, x)).collect();
            let coeffs = fit_var(&latent, 5).unwrap();
            let recent: Vec<Vec<f64>> = (1..=5).map(|m| latent[latent.len() - m].clone()).collect();
            black_box(forecast_one_step(&coeffs, &recent).unwrap())
        })
    });
}

fn bench_selection(c: &mut Criterion) {
    let dirs = ReferenceDirectionSet::generate(2, 99).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let bounds = vare::domain::Bounds::uniform(10, 0.0, 1.0);
    let union: Vec<Individual> = (0..200)
        .map(|_| {
            Individual::new(
                DecisionVector::new(vec![0.5; 10], bounds.clone()),
                ObjectiveVector::new(vec![rng.random::<f64>(), rng.random::<f64>()]),
                0,
            )
        })
        .collect();

    c.bench_function("diversity-sort/200-to-100", |b| {
        b.iter(|| diversity_centred_sort(black_box(&union), &dirs, &[0.0, 0.0], &[1.0, 1.0], 100))
    });
}

fn bench_problem_evaluation(c: &mut Criterion) {
    let problem = by_name("df4", None).unwrap();
    let bounds = problem.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let population: Vec<DecisionVector> = (0..100)
        .map(|_| {
            let values: Vec<f64> = bounds
                .pairs()
                .iter()
                .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect();
            DecisionVector::new(values, bounds.clone())
        })
        .collect();

    c.bench_function("evaluate/df4-population-100", |b| {
        b.iter(|| {
            for x in &population {
                black_box(problem.evaluate(x, 0.7).unwrap());
            }
        })
    });
}

fn bench_full_environment(c: &mut Criterion) {
    let problem = by_name("df4", None).unwrap();
    let cache = PfCache::new(2_000);
    // warm the reference cache so the bench isolates the optimiser
    for env in 0..5u32 {
        cache.get(
            problem.as_ref(),
            &TimeContext::at_generation(env * 10, 10, 10),
        );
    }
    c.bench_function("run/df4-5-environments", |b| {
        b.iter(|| {
            let cfg = AlgorithmConfig {
                environments: 5,
                seed: 7,
                ..AlgorithmConfig::for_problem(problem.as_ref())
            };
            black_box(run(problem.as_ref(), &cfg, &cache).unwrap())
        })
    });
}

criterion_group!(
    kernels,
    bench_igd,
    bench_hypervolume,
    bench_forecast_pipeline,
    bench_selection,
    bench_problem_evaluation,
    bench_full_environment
);
criterion_main!(kernels);
