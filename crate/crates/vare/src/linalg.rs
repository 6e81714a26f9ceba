//! Small dense linear-algebra kernels: symmetric eigendecomposition via
//! cyclic Jacobi rotations and an LU solver with partial pivoting. Sized for
//! the low-dimensional matrices this crate works with (n ≤ ~50).
#![allow(clippy::needless_range_loop)]

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` sorted by descending eigenvalue;
/// eigenvectors are returned as rows of the outer `Vec`, each a unit vector.
/// Convergence: all off-diagonal magnitudes below 1e-12, at most 100 sweeps.
pub(crate) fn symmetric_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    debug_assert!(matrix.iter().all(|row| row.len() == n));

    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    // v starts as identity; accumulates rotations so column j of v is the
    // eigenvector of a's j-th diagonal entry.
    let mut v = vec![vec![0.0; n]; n];
    for (j, row) in v.iter_mut().enumerate() {
        row[j] = 1.0;
    }

    const TOL: f64 = 1e-12;
    const MAX_SWEEPS: usize = 100;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p][q].abs());
            }
        }
        if off < TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < TOL {
                    continue;
                }
                let apq = a[p][q];
                let app = a[p][p];
                let aqq = a[q][q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for r in 0..n {
                    let arp = a[r][p];
                    let arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[p][r];
                    let aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for r in 0..n {
                    let vrp = v[r][p];
                    let vrq = v[r][q];
                    v[r][p] = c * vrp - s * vrq;
                    v[r][q] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&j| a[j][j]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|r| v[r][j]).collect())
        .collect();
    (eigenvalues, eigenvectors)
}

/// Solve `A·X = B` for multiple right-hand sides using LU with partial
/// pivoting. `b` holds the right-hand sides as rows of length `n` transposed:
/// `b[r]` is the r-th right-hand-side vector. Returns the solutions in the
/// same layout. Panics on a numerically singular pivot.
pub(crate) fn solve_multi(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut lu: Vec<Vec<f64>> = a.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        let mut pivot = col;
        for row in (col + 1)..n {
            if lu[row][col].abs() > lu[pivot][col].abs() {
                pivot = row;
            }
        }
        assert!(
            lu[pivot][col].abs() > 1e-300,
            "singular matrix in linear solve"
        );
        lu.swap(col, pivot);
        perm.swap(col, pivot);
        for row in (col + 1)..n {
            let f = lu[row][col] / lu[col][col];
            lu[row][col] = f;
            for k in (col + 1)..n {
                lu[row][k] -= f * lu[col][k];
            }
        }
    }

    b.iter()
        .map(|rhs| {
            let mut y = vec![0.0; n];
            for i in 0..n {
                let mut s = rhs[perm[i]];
                for (k, yk) in y.iter().enumerate().take(i) {
                    s -= lu[i][k] * yk;
                }
                y[i] = s;
            }
            let mut x = vec![0.0; n];
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in (i + 1)..n {
                    s -= lu[i][k] * x[k];
                }
                x[i] = s / lu[i][i];
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_diagonal_matrix() {
        let m = vec![vec![2.0, 0.0], vec![0.0, 5.0]];
        let (vals, vecs) = symmetric_eigen(&m);
        assert!((vals[0] - 5.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        assert!(vecs[0][1].abs() > 0.99);
        assert!(vecs[1][0].abs() > 0.99);
    }

    #[test]
    fn eigen_reconstructs_symmetric_matrix() {
        let m = vec![
            vec![4.0, 1.0, -2.0],
            vec![1.0, 2.0, 0.0],
            vec![-2.0, 0.0, 3.0],
        ];
        let (vals, vecs) = symmetric_eigen(&m);
        // A = Σ λ_i v_i v_iᵀ
        for r in 0..3 {
            for c in 0..3 {
                let rebuilt: f64 = (0..3).map(|i| vals[i] * vecs[i][r] * vecs[i][c]).sum();
                assert!((rebuilt - m[r][c]).abs() < 1e-9, "entry ({r},{c})");
            }
        }
        // orthonormal rows
        for i in 0..3 {
            for j in 0..3 {
                let d = dot(&vecs[i], &vecs[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn eigen_trace_equals_sum_of_eigenvalues() {
        let m = vec![
            vec![1.0, 0.5, 0.1],
            vec![0.5, 3.0, -0.2],
            vec![0.1, -0.2, 2.0],
        ];
        let (vals, _) = symmetric_eigen(&m);
        let trace = 1.0 + 3.0 + 2.0;
        assert!((vals.iter().sum::<f64>() - trace).abs() < 1e-10);
    }

    #[test]
    fn lu_solves_known_system() {
        let a = vec![vec![3.0, 1.0], vec![1.0, 2.0]];
        let x = solve_multi(&a, &[vec![9.0, 8.0]]);
        assert!((x[0][0] - 2.0).abs() < 1e-12);
        assert!((x[0][1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lu_multi_rhs() {
        let a = vec![vec![2.0, 0.0], vec![0.0, 4.0]];
        let x = solve_multi(&a, &[vec![2.0, 4.0], vec![6.0, 8.0]]);
        assert_eq!(x[0], vec![1.0, 1.0]);
        assert_eq!(x[1], vec![3.0, 2.0]);
    }
}
