//! Dimensionality reduction and autoregressive forecasting of archived
//! solution trajectories.
//!
//! A per-direction history of decision vectors is compressed with PCA into a
//! k-dimensional latent space (k chosen to explain a fraction of the variance,
//! 0.80 by default), a VAR(l) model is fitted to the latent series by
//! ridge-regularised least squares, and the one-step forecast is mapped back
//! to decision space as the predicted solution for the next environment.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::linalg::{dot, solve_multi, symmetric_eigen};

/// Default fraction of variance the retained components must explain.
pub const DEFAULT_VARIANCE_THRESHOLD: f64 = 0.80;

/// Ridge penalty applied to the least-squares coefficients; keeps the fit
/// defined on rank-deficient regressor matrices (constant or short series).
pub const RIDGE: f64 = 1e-6;

/// PCA basis of an archived series: mean, retained principal components and
/// their eigenvalues (descending).
#[derive(Debug, Clone, PartialEq)]
pub struct PcaBasis {
    pub mean: Vec<f64>,
    /// Retained components, one unit vector of length n per entry.
    pub components: Vec<Vec<f64>>,
    /// Scatter-matrix eigenvalues of the retained components, descending.
    pub eigenvalues: Vec<f64>,
    /// Retained rank.
    pub k: usize,
    /// Trace of the scatter matrix (sum over the full spectrum).
    pub total_variance: f64,
}

/// Fit a PCA basis to a series of n-vectors.
///
/// The scatter matrix `C = Σ (a_j − mean)(a_j − mean)ᵀ` is eigendecomposed
/// with cyclic Jacobi rotations and the smallest rank whose cumulative
/// eigenvalue fraction reaches `variance_threshold` is retained. A constant
/// series yields rank 1 with a zero eigenvalue and an arbitrary unit
/// component.
pub fn fit_pca(series: &[Vec<f64>], variance_threshold: f64) -> Result<PcaBasis> {
    if series.len() < 2 {
        return Err(Error::ShortSeries {
            len: series.len(),
            need: 2,
        });
    }
    if !(variance_threshold > 0.0 && variance_threshold <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "variance threshold must be in (0, 1], got {variance_threshold}"
        )));
    }
    let n = series[0].len();
    if series.iter().any(|a| a.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: series.iter().map(|a| a.len()).find(|&l| l != n).unwrap(),
        });
    }

    let count = series.len() as f64;
    let mean: Vec<f64> = (0..n)
        .map(|j| series.iter().map(|a| a[j]).sum::<f64>() / count)
        .collect();

    let mut scatter = vec![vec![0.0; n]; n];
    for a in series {
        for r in 0..n {
            let dr = a[r] - mean[r];
            for c in r..n {
                scatter[r][c] += dr * (a[c] - mean[c]);
            }
        }
    }
    for r in 0..n {
        for c in 0..r {
            scatter[r][c] = scatter[c][r];
        }
    }

    let (raw_vals, vecs) = symmetric_eigen(&scatter);
    let eigenvalues: Vec<f64> = raw_vals.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();

    if total <= 0.0 {
        // constant series: zero scatter, no preferred direction
        let mut component = vec![0.0; n];
        component[0] = 1.0;
        return Ok(PcaBasis {
            mean,
            components: vec![component],
            eigenvalues: vec![0.0],
            k: 1,
            total_variance: 0.0,
        });
    }

    let mut k = n;
    let mut cumulative = 0.0;
    for (i, v) in eigenvalues.iter().enumerate() {
        cumulative += v;
        if cumulative >= variance_threshold * total {
            k = i + 1;
            break;
        }
    }

    let components: Vec<Vec<f64>> = vecs
        .into_iter()
        .take(k)
        .map(|mut v| {
            // deterministic sign: largest-magnitude entry nonnegative
            let lead = v
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            if v[lead] < 0.0 {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
            v
        })
        .collect();

    Ok(PcaBasis {
        mean,
        components,
        eigenvalues: eigenvalues[..k].to_vec(),
        k,
        total_variance: total,
    })
}

/// Coordinates of `x` in the retained subspace: `y = V_kᵀ (x − mean)`.
pub fn project(basis: &PcaBasis, x: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), basis.mean.len());
    let centered: Vec<f64> = x
        .iter()
        .zip(basis.mean.iter())
        .map(|(a, m)| a - m)
        .collect();
    basis.components.iter().map(|v| dot(v, &centered)).collect()
}

/// Map latent coordinates back to decision space: `x = mean + Σ y_j v_j`.
pub fn reconstruct(basis: &PcaBasis, y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(y.len(), basis.k);
    let mut x = basis.mean.clone();
    for (coeff, v) in y.iter().zip(basis.components.iter()) {
        for (xi, vi) in x.iter_mut().zip(v.iter()) {
            *xi += coeff * vi;
        }
    }
    x
}

/// Fitted VAR(l): intercept plus one k×k coefficient matrix per lag.
#[derive(Debug, Clone, PartialEq)]
pub struct VarCoefficients {
    pub lag: usize,
    pub intercept: Vec<f64>,
    /// `lag_matrices[m][i][j]`: effect of variable j at lag m+1 on variable i.
    pub lag_matrices: Vec<Vec<Vec<f64>>>,
}

impl VarCoefficients {
    pub fn latent_dim(&self) -> usize {
        self.intercept.len()
    }
}

/// Least-squares fit of a VAR(l) model with ridge penalty [`RIDGE`].
///
/// Needs at least `lag + 2` observations (two regression rows).
pub fn fit_var(series: &[Vec<f64>], lag: usize) -> Result<VarCoefficients> {
    if lag < 1 {
        return Err(Error::InvalidArgument("lag must be at least 1".into()));
    }
    let t_len = series.len();
    if t_len < lag + 2 {
        return Err(Error::ShortSeries {
            len: t_len,
            need: lag + 2,
        });
    }
    let k = series[0].len();
    if k == 0 || series.iter().any(|x| x.len() != k) {
        return Err(Error::DimensionMismatch {
            expected: k.max(1),
            got: series
                .iter()
                .map(|x| x.len())
                .find(|&l| l != k)
                .unwrap_or(0),
        });
    }

    let p = 1 + k * lag;
    let rows = t_len - lag;

    // regressor row for target time τ: [1, x_{τ-1}, ..., x_{τ-lag}]
    let regressor = |tau: usize| -> Vec<f64> {
        let mut z = Vec::with_capacity(p);
        z.push(1.0);
        for m in 1..=lag {
            z.extend_from_slice(&series[tau - m]);
        }
        z
    };

    let mut gram = vec![vec![0.0; p]; p];
    let mut rhs = vec![vec![0.0; p]; k];
    for row in 0..rows {
        let tau = lag + row;
        let z = regressor(tau);
        for a in 0..p {
            for b in a..p {
                gram[a][b] += z[a] * z[b];
            }
            for (i, rhs_i) in rhs.iter_mut().enumerate() {
                rhs_i[a] += z[a] * series[tau][i];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            gram[a][b] = gram[b][a];
        }
        gram[a][a] += RIDGE;
    }

    let solutions = solve_multi(&gram, &rhs);

    let intercept: Vec<f64> = solutions.iter().map(|w| w[0]).collect();
    let lag_matrices: Vec<Vec<Vec<f64>>> = (0..lag)
        .map(|m| {
            (0..k)
                .map(|i| (0..k).map(|j| solutions[i][1 + m * k + j]).collect())
                .collect()
        })
        .collect();

    Ok(VarCoefficients {
        lag,
        intercept,
        lag_matrices,
    })
}

/// One-step forecast from the `lag` most recent observations, newest first:
/// `x̂ = α + Σ_m β^m · recent[m-1]`.
pub fn forecast_one_step(coeffs: &VarCoefficients, recent: &[Vec<f64>]) -> Result<Vec<f64>> {
    if recent.len() != coeffs.lag {
        return Err(Error::DimensionMismatch {
            expected: coeffs.lag,
            got: recent.len(),
        });
    }
    let k = coeffs.latent_dim();
    if recent.iter().any(|x| x.len() != k) {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: recent.iter().map(|x| x.len()).find(|&l| l != k).unwrap(),
        });
    }
    let mut out = coeffs.intercept.clone();
    for (beta, x) in coeffs.lag_matrices.iter().zip(recent.iter()) {
        for (i, out_i) in out.iter_mut().enumerate() {
            *out_i += dot(&beta[i], x);
        }
    }
    Ok(out)
}
