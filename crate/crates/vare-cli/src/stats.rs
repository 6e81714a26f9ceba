//! Two-sided Wilcoxon rank-sum test with normal approximation, midranks for
//! ties, and a continuity correction.

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Minimum per-group sample size accepted by [`wilcoxon_rank_sum`].
pub const MIN_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSumTest {
    /// Rank sum W of the first group (midranks).
    pub statistic: f64,
    /// Two-sided p-value from the normal approximation.
    pub p_value: f64,
}

impl RankSumTest {
    pub fn significant_at(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Rank-sum test of `a` against `b`. Requires at least [`MIN_SAMPLES`]
/// observations per group. Fully tied data yields `p = 1`.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<RankSumTest> {
    let smaller = a.len().min(b.len());
    if smaller < MIN_SAMPLES {
        return Err(HarnessError::InsufficientSamples {
            need: MIN_SAMPLES,
            got: smaller,
        });
    }
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let n = n1 + n2;

    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());

    // midranks and tie-group sizes
    let mut w = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let group = (j - i) as f64;
        let midrank = (i + j + 1) as f64 / 2.0; // average of ranks i+1..=j
        for item in &pooled[i..j] {
            if item.1 {
                w += midrank;
            }
        }
        tie_term += group * group * group - group;
        i = j;
    }

    let mean = n1 * (n + 1.0) / 2.0;
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return Ok(RankSumTest {
            statistic: w,
            p_value: 1.0,
        });
    }
    let z = ((w - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    let p_value = (2.0 * (1.0 - standard_normal_cdf(z))).clamp(0.0, 1.0);
    Ok(RankSumTest {
        statistic: w,
        p_value,
    })
}

fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

// Abramowitz & Stegun 7.1.26, |error| < 1.5e-7
fn erf(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}
