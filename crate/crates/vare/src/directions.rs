//! Reference directions on the unit simplex and the angle-based association
//! of objective vectors with them. Directions decompose objective space into
//! subspaces used for selection, archiving and per-direction prediction.

use crate::domain::{Individual, ObjectiveVector};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

/// Penalty parameter of the boundary-intersection scalarisation.
pub const PBI_THETA: f64 = 5.0;

/// A simplex-lattice spread of N direction vectors, each of length M with
/// nonnegative components summing to 1, in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceDirectionSet {
    directions: Vec<Vec<f64>>,
    objective_dim: usize,
}

impl ReferenceDirectionSet {
    /// Das–Dennis simplex lattice with `resolution` divisions per axis.
    /// Produces `C(resolution + m - 1, m - 1)` directions.
    pub fn generate(m: usize, resolution: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 objectives, got {m}"
            )));
        }
        if resolution < 1 {
            return Err(Error::InvalidArgument(
                "lattice resolution must be at least 1".into(),
            ));
        }
        let mut directions = Vec::new();
        let mut current = vec![0usize; m];
        fill_lattice(&mut directions, &mut current, resolution, 0, m);
        let h = resolution as f64;
        let directions = directions
            .into_iter()
            .map(|ticks| ticks.into_iter().map(|k| k as f64 / h).collect())
            .collect();
        Ok(ReferenceDirectionSet {
            directions,
            objective_dim: m,
        })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn objective_dim(&self) -> usize {
        self.objective_dim
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.directions[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.directions.iter().map(|d| d.as_slice())
    }
}

fn fill_lattice(
    out: &mut Vec<Vec<usize>>,
    current: &mut Vec<usize>,
    remaining: usize,
    depth: usize,
    m: usize,
) {
    if depth == m - 1 {
        current[depth] = remaining;
        out.push(current.clone());
        return;
    }
    for k in 0..=remaining {
        current[depth] = k;
        fill_lattice(out, current, remaining - k, depth + 1, m);
    }
}

/// Map objectives into the unit box spanned by `ideal` and `nadir`.
/// A degenerate coordinate (ideal == nadir) is scaled by range 1 so the
/// mapping stays total.
pub fn normalize_for_association(values: &[f64], ideal: &[f64], nadir: &[f64]) -> Vec<f64> {
    values
        .iter()
        .zip(ideal.iter().zip(nadir.iter()))
        .map(|(v, (lo, hi))| {
            let range = hi - lo;
            if range > 0.0 {
                (v - lo) / range
            } else {
                v - lo
            }
        })
        .collect()
}

/// Index of the direction forming the smallest acute angle with `v`
/// (already normalized). Ties break toward the lowest index; a zero vector
/// maps to index 0.
pub fn associate_normalized(v: &[f64], dirs: &ReferenceDirectionSet) -> usize {
    let v_norm = norm(v);
    if v_norm == 0.0 {
        return 0;
    }
    let mut best = 0usize;
    let mut best_cos = f64::NEG_INFINITY;
    for (i, d) in dirs.iter().enumerate() {
        let cos = dot(v, d) / (v_norm * norm(d));
        if cos > best_cos {
            best_cos = cos;
            best = i;
        }
    }
    best
}

/// Associate an individual with a direction after ideal–nadir normalisation.
pub fn associate(
    individual: &Individual,
    dirs: &ReferenceDirectionSet,
    ideal: &ObjectiveVector,
    nadir: &ObjectiveVector,
) -> usize {
    let v = normalize_for_association(&individual.objectives.values, &ideal.values, &nadir.values);
    associate_normalized(&v, dirs)
}

/// Penalty-boundary-intersection scalarisation of a normalized objective
/// vector along a direction: distance along the direction plus `theta` times
/// the perpendicular distance. Smaller is better.
pub fn pbi(v: &[f64], direction: &[f64], theta: f64) -> f64 {
    let d_norm = norm(direction);
    debug_assert!(d_norm > 0.0);
    let d1 = dot(v, direction) / d_norm;
    let d2_sq: f64 = v
        .iter()
        .zip(direction.iter())
        .map(|(vi, di)| {
            let proj = d1 * di / d_norm;
            (vi - proj) * (vi - proj)
        })
        .sum();
    d1 + theta * d2_sq.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Bounds, DecisionVector};

    fn individual_with_objectives(values: Vec<f64>) -> Individual {
        let b = Bounds::uniform(2, 0.0, 1.0);
        Individual::new(
            DecisionVector::new(vec![0.0, 0.0], b),
            ObjectiveVector::new(values),
            0,
        )
    }

    #[test]
    fn biobjective_lattice_counts_and_order() {
        let dirs = ReferenceDirectionSet::generate(2, 99).unwrap();
        assert_eq!(dirs.len(), 100);
        assert_eq!(dirs.direction(0), &[0.0, 1.0]);
        assert_eq!(dirs.direction(99), &[1.0, 0.0]);
    }

    #[test]
    fn triobjective_lattice_count() {
        let dirs = ReferenceDirectionSet::generate(3, 13).unwrap();
        assert_eq!(dirs.len(), 105);
    }

    #[test]
    fn resolution_one_lattice() {
        let dirs = ReferenceDirectionSet::generate(2, 1).unwrap();
        assert_eq!(dirs.len(), 2);
        assert_eq!(dirs.direction(0), &[0.0, 1.0]);
        assert_eq!(dirs.direction(1), &[1.0, 0.0]);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(ReferenceDirectionSet::generate(1, 10).is_err());
        assert!(ReferenceDirectionSet::generate(2, 0).is_err());
    }

    #[test]
    fn components_sum_to_one() {
        for (m, h) in [(2usize, 99usize), (3, 13), (3, 5), (4, 4)] {
            let dirs = ReferenceDirectionSet::generate(m, h).unwrap();
            for d in dirs.iter() {
                let s: f64 = d.iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
                assert!(d.iter().all(|&x| x >= 0.0));
            }
        }
    }

    #[test]
    fn directions_are_pairwise_distinct() {
        let dirs = ReferenceDirectionSet::generate(3, 13).unwrap();
        for i in 0..dirs.len() {
            for j in (i + 1)..dirs.len() {
                assert_ne!(dirs.direction(i), dirs.direction(j));
            }
        }
    }

    #[test]
    fn association_picks_collinear_direction() {
        let dirs = ReferenceDirectionSet::generate(2, 2).unwrap();
        // directions: (0,1), (0.5,0.5), (1,0)
        let ideal = ObjectiveVector::new(vec![0.0, 0.0]);
        let nadir = ObjectiveVector::new(vec![1.0, 1.0]);

        let up = individual_with_objectives(vec![0.0, 1.0]);
        assert_eq!(associate(&up, &dirs, &ideal, &nadir), 0);

        let diag = individual_with_objectives(vec![0.5, 0.5]);
        assert_eq!(associate(&diag, &dirs, &ideal, &nadir), 1);
    }

    #[test]
    fn association_matches_brute_force_angles() {
        let dirs = ReferenceDirectionSet::generate(2, 2).unwrap();
        let v = [0.4, 0.6];
        // independent angle computation
        let mut best = 0;
        let mut best_angle = f64::INFINITY;
        for (i, d) in dirs.iter().enumerate() {
            let cos = dot(&v, d) / (norm(&v) * norm(d));
            let angle = cos.clamp(-1.0, 1.0).acos();
            if angle < best_angle {
                best_angle = angle;
                best = i;
            }
        }
        assert_eq!(best, 1, "(0.4,0.6) is closest to (0.5,0.5) by angle");
        assert_eq!(associate_normalized(&v, &dirs), best);
    }

    #[test]
    fn association_handles_degenerate_range_and_zero_vector() {
        let dirs = ReferenceDirectionSet::generate(2, 2).unwrap();
        let ideal = ObjectiveVector::new(vec![0.0, 1.0]);
        let nadir = ObjectiveVector::new(vec![1.0, 1.0]); // coordinate 1 degenerate
        let ind = individual_with_objectives(vec![0.5, 1.0]);
        // total: must return some index without panicking
        let idx = associate(&ind, &dirs, &ideal, &nadir);
        assert!(idx < dirs.len());

        assert_eq!(associate_normalized(&[0.0, 0.0], &dirs), 0);
    }

    #[test]
    fn pbi_prefers_on_axis_convergent_points() {
        let lambda = [0.5, 0.5];
        let near = pbi(&[0.3, 0.3], &lambda, PBI_THETA);
        let far = pbi(&[0.6, 0.6], &lambda, PBI_THETA);
        let off = pbi(&[0.0, 0.6], &lambda, PBI_THETA);
        assert!(near < far, "closer along the direction scores better");
        assert!(far < off, "perpendicular deviation is penalised");
    }
}
