//! Performance indicators for dynamic runs: inverted generational distance,
//! hypervolume (2-D sweep, 3-D slicing), their per-run means, and the
//! nondominated ranking of paired (MIGD, MHV) scores.

use std::time::Duration;

use crate::domain::ObjectiveVector;
use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Per-environment indicator values of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord {
    pub environment_index: u32,
    pub igd: f64,
    pub hv: f64,
    /// Wall time spent in the environment.
    pub wall: Duration,
}

/// Max–min normalisation of a point set. Coordinates with zero range map
/// to 0.
pub fn normalize(points: &[ObjectiveVector], ideal: &[f64], nadir: &[f64]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            p.values
                .iter()
                .zip(ideal.iter().zip(nadir.iter()))
                .map(|(v, (lo, hi))| {
                    let range = hi - lo;
                    if range > 0.0 {
                        (v - lo) / range
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

fn nearest_distance(point: &[f64], set: &[Vec<f64>]) -> f64 {
    set.iter()
        .map(|q| {
            point
                .iter()
                .zip(q.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Mean distance from each reference point to its nearest approximation
/// point. Both sets are expected to be normalised by the caller.
pub fn igd(reference: &[Vec<f64>], approximation: &[Vec<f64>]) -> Result<f64> {
    if approximation.is_empty() {
        return Err(Error::EmptyApproximation);
    }
    if reference.is_empty() {
        return Err(Error::InvalidArgument("empty reference set".into()));
    }
    // map to a vec first so the reduction order stays fixed regardless of
    // thread scheduling
    #[cfg(feature = "parallel")]
    let distances: Vec<f64> = reference
        .par_iter()
        .map(|r| nearest_distance(r, approximation))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let distances: Vec<f64> = reference
        .iter()
        .map(|r| nearest_distance(r, approximation))
        .collect();
    Ok(distances.iter().sum::<f64>() / reference.len() as f64)
}

/// Lebesgue measure of the region dominated by `points` and bounded by
/// `reference_point` (minimisation). Points outside the reference box are
/// dropped. Supports 2 and 3 objectives.
pub fn hypervolume(points: &[Vec<f64>], reference_point: &[f64]) -> f64 {
    let m = reference_point.len();
    assert!(m == 2 || m == 3, "hypervolume supports 2 or 3 objectives");
    let contributing: Vec<&Vec<f64>> = points
        .iter()
        .filter(|p| p.iter().zip(reference_point.iter()).all(|(a, r)| a <= r))
        .collect();
    if contributing.is_empty() {
        return 0.0;
    }
    match m {
        2 => {
            let pts: Vec<(f64, f64)> = contributing.iter().map(|p| (p[0], p[1])).collect();
            area_2d(pts, reference_point[0], reference_point[1])
        }
        _ => volume_3d(&contributing, reference_point),
    }
}

/// Union area of the boxes `[p, (r0, r1)]` via a left-to-right sweep.
fn area_2d(mut pts: Vec<(f64, f64)>, r0: f64, r1: f64) -> f64 {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut area = 0.0;
    let mut ceiling = r1;
    for (f1, f2) in pts {
        if f2 < ceiling {
            area += (r0 - f1) * (ceiling - f2);
            ceiling = f2;
        }
    }
    area
}

/// Sweep the third objective in slabs; each slab contributes the 2-D union
/// area of the points already seen.
fn volume_3d(points: &[&Vec<f64>], r: &[f64]) -> f64 {
    let mut sorted: Vec<&Vec<f64>> = points.to_vec();
    sorted.sort_by(|a, b| {
        a[2].partial_cmp(&b[2])
            .unwrap()
            .then(a[0].partial_cmp(&b[0]).unwrap())
            .then(a[1].partial_cmp(&b[1]).unwrap())
    });

    let mut volume = 0.0;
    let mut active: Vec<(f64, f64)> = Vec::new();
    let mut idx = 0;
    while idx < sorted.len() {
        let z = sorted[idx][2];
        while idx < sorted.len() && sorted[idx][2] == z {
            active.push((sorted[idx][0], sorted[idx][1]));
            idx += 1;
        }
        let z_next = if idx < sorted.len() {
            sorted[idx][2]
        } else {
            r[2]
        };
        if z_next > z {
            volume += area_2d(active.clone(), r[0], r[1]) * (z_next - z);
        }
    }
    volume
}

/// Means of the per-environment IGD and HV values: `(MIGD, MHV)`.
pub fn aggregate(records: &[MetricRecord]) -> (f64, f64) {
    assert!(!records.is_empty(), "need at least one record");
    let t = records.len() as f64;
    let migd = records.iter().map(|r| r.igd).sum::<f64>() / t;
    let mhv = records.iter().map(|r| r.hv).sum::<f64>() / t;
    (migd, mhv)
}

/// Nondominated ranking of paired `(MIGD, MHV)` scores, MIGD minimised and
/// MHV maximised. All members of the r-th front receive rank r (1-based).
pub fn rank_algorithms(paired: &[(f64, f64)]) -> Vec<usize> {
    let dominates =
        |a: &(f64, f64), b: &(f64, f64)| a.0 <= b.0 && a.1 >= b.1 && (a.0 < b.0 || a.1 > b.1);
    let mut rank = vec![0usize; paired.len()];
    let mut remaining: Vec<usize> = (0..paired.len()).collect();
    let mut front = 1;
    while !remaining.is_empty() {
        let nondominated: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| {
                !remaining
                    .iter()
                    .any(|&j| j != i && dominates(&paired[j], &paired[i]))
            })
            .collect();
        for &i in &nondominated {
            rank[i] = front;
        }
        remaining.retain(|i| !nondominated.contains(i));
        front += 1;
    }
    rank
}
