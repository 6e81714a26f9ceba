//! Real-coded variation operators: polynomial mutation, simulated binary
//! crossover and the cluster-manifold sampling used as the default
//! reproduction operator.

#![allow(clippy::needless_range_loop)]

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::domain::Bounds;
use crate::linalg::symmetric_eigen;

/// Polynomial mutation (distribution index `eta`) applied in place.
///
/// Each variable mutates with probability `p_m`; the perturbation follows
/// Deb's bounded polynomial distribution, so a uniform draw of exactly 0.5
/// leaves the variable unchanged. Coordinates with a degenerate box are
/// skipped. The result stays within bounds.
pub fn polynomial_mutation(
    values: &mut [f64],
    bounds: &Bounds,
    eta: f64,
    p_m: f64,
    rng: &mut impl Rng,
) {
    debug_assert!(eta > 0.0);
    for j in 0..values.len() {
        let (lo, hi) = (bounds.lower(j), bounds.upper(j));
        if hi <= lo {
            continue;
        }
        if rng.random::<f64>() >= p_m {
            continue;
        }
        let x = values[j];
        let range = hi - lo;
        let delta1 = (x - lo) / range;
        let delta2 = (hi - x) / range;
        let u: f64 = rng.random();
        let mut_pow = 1.0 / (eta + 1.0);
        let delta_q = if u < 0.5 {
            let xy = 1.0 - delta1;
            let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
            val.powf(mut_pow) - 1.0
        } else {
            let xy = 1.0 - delta2;
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
            1.0 - val.powf(mut_pow)
        };
        values[j] = (x + delta_q * range).clamp(lo, hi);
    }
}

/// Simulated binary crossover (distribution index `eta`) of two parents,
/// variable by variable. Children are clamped to bounds.
pub fn sbx_crossover(
    parent_a: &[f64],
    parent_b: &[f64],
    bounds: &Bounds,
    eta: f64,
    rng: &mut impl Rng,
) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(parent_a.len(), parent_b.len());
    let mut child_a = parent_a.to_vec();
    let mut child_b = parent_b.to_vec();
    for j in 0..parent_a.len() {
        let p1 = parent_a[j];
        let p2 = parent_b[j];
        if (p1 - p2).abs() < 1e-14 {
            continue;
        }
        let u: f64 = rng.random();
        let beta_q = if u <= 0.5 {
            (2.0 * u).powf(1.0 / (eta + 1.0))
        } else {
            (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
        };
        let (lo, hi) = (bounds.lower(j), bounds.upper(j));
        let sum = p1 + p2;
        let diff = (p2 - p1).abs();
        let c1 = 0.5 * (sum - beta_q * diff);
        let c2 = 0.5 * (sum + beta_q * diff);
        if p1 <= p2 {
            child_a[j] = c1.clamp(lo, hi);
            child_b[j] = c2.clamp(lo, hi);
        } else {
            child_a[j] = c2.clamp(lo, hi);
            child_b[j] = c1.clamp(lo, hi);
        }
    }
    (child_a, child_b)
}

/// Local linear model of one cluster: an affine manifold spanned by the
/// leading principal directions plus isotropic residual noise.
#[derive(Debug, Clone)]
pub struct ClusterModel {
    pub mean: Vec<f64>,
    /// Leading principal directions (manifold axes), unit vectors.
    pub axes: Vec<Vec<f64>>,
    /// Sampling interval per axis, already extended beyond the data range.
    pub ranges: Vec<(f64, f64)>,
    /// Standard deviation of the residual Gaussian noise.
    pub noise_sd: f64,
    /// True when the cluster was too small to fit a manifold; callers fall
    /// back to mutation of the cluster members.
    pub degenerate: bool,
}

/// Cluster-manifold model over a population of decision vectors.
#[derive(Debug, Clone)]
pub struct ManifoldModel {
    pub clusters: Vec<ClusterModel>,
    /// Cluster index of each input point.
    pub assignment: Vec<usize>,
}

/// Partition `points` into `cluster_count` groups by k-means (k-means++
/// seeding, Lloyd iterations) and fit a `manifold_dim`-dimensional local PCA
/// model to each group. `extension` widens the per-axis sampling range by
/// that fraction on each side. Clusters with fewer than `manifold_dim + 1`
/// points are marked degenerate.
pub fn fit_manifold_model(
    points: &[Vec<f64>],
    manifold_dim: usize,
    cluster_count: usize,
    extension: f64,
    rng: &mut impl Rng,
) -> ManifoldModel {
    assert!(!points.is_empty());
    let k = cluster_count.min(points.len()).max(1);
    let assignment = kmeans(points, k, rng);

    let clusters = (0..k)
        .map(|c| {
            let members: Vec<&Vec<f64>> = points
                .iter()
                .zip(assignment.iter())
                .filter(|(_, &a)| a == c)
                .map(|(p, _)| p)
                .collect();
            fit_cluster(&members, manifold_dim, extension)
        })
        .collect();

    ManifoldModel {
        clusters,
        assignment,
    }
}

fn fit_cluster(members: &[&Vec<f64>], manifold_dim: usize, extension: f64) -> ClusterModel {
    let n = members.first().map_or(0, |m| m.len());
    if members.len() <= manifold_dim || n == 0 {
        let mean = if members.is_empty() {
            vec![0.0; n]
        } else {
            column_mean(members)
        };
        return ClusterModel {
            mean,
            axes: Vec::new(),
            ranges: Vec::new(),
            noise_sd: 0.0,
            degenerate: true,
        };
    }

    let mean = column_mean(members);
    let mut cov = vec![vec![0.0; n]; n];
    for m in members {
        for r in 0..n {
            let dr = m[r] - mean[r];
            for c in r..n {
                cov[r][c] += dr * (m[c] - mean[c]);
            }
        }
    }
    let denom = (members.len() - 1) as f64;
    for r in 0..n {
        for c in 0..n {
            if c < r {
                cov[r][c] = cov[c][r];
            } else {
                cov[r][c] /= denom;
            }
        }
    }

    let (vals, vecs) = symmetric_eigen(&cov);
    let axes: Vec<Vec<f64>> = vecs.into_iter().take(manifold_dim).collect();

    let ranges: Vec<(f64, f64)> = axes
        .iter()
        .map(|axis| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for m in members {
                let proj: f64 = m
                    .iter()
                    .zip(mean.iter())
                    .zip(axis.iter())
                    .map(|((x, mu), a)| (x - mu) * a)
                    .sum();
                lo = lo.min(proj);
                hi = hi.max(proj);
            }
            let pad = extension * (hi - lo);
            (lo - pad, hi + pad)
        })
        .collect();

    let residual: f64 = vals
        .iter()
        .skip(manifold_dim)
        .map(|&v| v.max(0.0))
        .sum::<f64>()
        / (n - manifold_dim).max(1) as f64;

    ClusterModel {
        mean,
        axes,
        ranges,
        noise_sd: residual.sqrt(),
        degenerate: false,
    }
}

/// Draw one offspring from a cluster model: a uniform point on the extended
/// manifold plus isotropic Gaussian noise, clamped to bounds. Must not be
/// called on a degenerate cluster.
pub fn sample_from_cluster(model: &ClusterModel, bounds: &Bounds, rng: &mut impl Rng) -> Vec<f64> {
    debug_assert!(!model.degenerate);
    let mut x = model.mean.clone();
    for (axis, &(lo, hi)) in model.axes.iter().zip(model.ranges.iter()) {
        let coeff = if hi > lo {
            rng.random_range(lo..=hi)
        } else {
            lo
        };
        for (xi, ai) in x.iter_mut().zip(axis.iter()) {
            *xi += coeff * ai;
        }
    }
    if model.noise_sd > 0.0 {
        let normal = Normal::new(0.0, model.noise_sd).unwrap();
        for xi in x.iter_mut() {
            *xi += normal.sample(rng);
        }
    }
    bounds.repair(&mut x);
    x
}

fn column_mean(members: &[&Vec<f64>]) -> Vec<f64> {
    let n = members[0].len();
    let count = members.len() as f64;
    (0..n)
        .map(|j| members.iter().map(|m| m[j]).sum::<f64>() / count)
        .collect()
}

fn kmeans(points: &[Vec<f64>], k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let sq_dist =
        |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum() };

    // k-means++ seeding
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..points.len())].clone());
    while centroids.len() < k {
        let dists: Vec<f64> = points
            .iter()
            .map(|p| {
                centroids
                    .iter()
                    .map(|c| sq_dist(p, c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = dists.iter().sum();
        if total <= 0.0 {
            // all points coincide with existing centroids
            centroids.push(points[0].clone());
            continue;
        }
        let mut target = rng.random::<f64>() * total;
        let mut chosen = points.len() - 1;
        for (i, d) in dists.iter().enumerate() {
            target -= d;
            if target <= 0.0 {
                chosen = i;
                break;
            }
        }
        centroids.push(points[chosen].clone());
    }

    let mut assignment = vec![0usize; points.len()];
    for _ in 0..20 {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = sq_dist(p, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = points
                .iter()
                .zip(assignment.iter())
                .filter(|(_, &a)| a == c)
                .map(|(p, _)| p)
                .collect();
            if !members.is_empty() {
                *centroid = column_mean(&members);
            }
        }
    }
    assignment
}
