//! Reference distributions and the generalized Kullback–Leibler CDF error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{norm_cdf, norm_inv_cdf};

/// Smallest empirical reference accepted.
pub const MIN_REFERENCE_SAMPLES: usize = 1_000;

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceCdf {
    AnalyticNormal { mean: f64, std: f64 },
    /// Sorted ascending.
    Empirical { samples: Vec<f64> },
}

impl ReferenceCdf {
    pub fn normal(mean: f64, std: f64) -> Result<Self> {
        if !(std > 0.0) || !mean.is_finite() || !std.is_finite() {
            return Err(Error::domain(format!("normal reference needs std > 0 (got {std})")));
        }
        Ok(Self::AnalyticNormal { mean, std })
    }

    pub fn empirical(mut samples: Vec<f64>) -> Result<Self> {
        if samples.len() < MIN_REFERENCE_SAMPLES {
            return Err(Error::domain(format!(
                "empirical reference needs at least {MIN_REFERENCE_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("reference sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        if samples[0] == samples[samples.len() - 1] {
            return Err(Error::domain("reference distribution is a point mass"));
        }
        Ok(Self::Empirical { samples })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::AnalyticNormal { mean, std } => norm_cdf((x - mean) / std),
            Self::Empirical { samples } => step_cdf(samples, x),
        }
    }

    /// Quantile; for the empirical case the order statistic at `ceil(p n)`.
    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            Self::AnalyticNormal { mean, std } => mean + std * norm_inv_cdf(p),
            Self::Empirical { samples } => {
                let n = samples.len();
                let k = ((p * n as f64).ceil() as usize).clamp(1, n);
                samples[k - 1]
            }
        }
    }
}

fn step_cdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

/// Fraction of `samples` that are `<= x`; `samples` need not be sorted.
pub fn empirical_cdf(samples: &[f64], x: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("empirical CDF of an empty sample"));
    }
    Ok(samples.iter().filter(|&&v| v <= x).count() as f64 / samples.len() as f64)
}

/// `F ln(F / F̃) + F̃ - F`, nonnegative and zero only when `F = F̃`.
pub fn kl_pointwise(f: f64, f_tilde: f64) -> f64 {
    if f == f_tilde {
        return 0.0;
    }
    if f <= 0.0 {
        return f_tilde;
    }
    let ft = f_tilde.max(1e-300);
    (f * (f / ft).ln() + ft - f).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub points: usize,
    /// The grid spans the reference quantiles `tail` and `1 - tail`...
    pub tail: f64,
    /// ...widened by this fraction of that span on each side.
    pub extension: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { points: 2048, tail: 1e-6, extension: 0.1 }
    }
}

pub fn integration_grid(reference: &ReferenceCdf, cfg: &GridConfig) -> Result<Vec<f64>> {
    if cfg.points < 2 || !(cfg.tail > 0.0 && cfg.tail < 0.5) || !(cfg.extension >= 0.0) {
        return Err(Error::domain(format!("invalid grid config {cfg:?}")));
    }
    let lo = reference.quantile(cfg.tail);
    let hi = reference.quantile(1.0 - cfg.tail);
    let pad = cfg.extension * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    if !(hi > lo) {
        return Err(Error::domain("reference has no spread"));
    }
    let step = (hi - lo) / (cfg.points - 1) as f64;
    Ok((0..cfg.points).map(|k| lo + step * k as f64).collect())
}

/// Reference CDF, approximate CDF and pointwise divergence on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProfile {
    pub grid: Vec<f64>,
    pub reference: Vec<f64>,
    pub approx: Vec<f64>,
    pub kl: Vec<f64>,
    pub epsilon: f64,
}

/// Scores precomputed approximate CDF values on `grid`.
pub fn error_profile(reference: &ReferenceCdf, grid: &[f64], approx: Vec<f64>) -> Result<ErrorProfile> {
    if approx.len() != grid.len() {
        return Err(Error::Dimension { expected: grid.len(), got: approx.len() });
    }
    if let Some(i) = approx.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("approximate CDF at x = {}", grid[i])));
    }
    let refv: Vec<f64> = match reference {
        // one pass over the sorted sample instead of a search per point
        ReferenceCdf::Empirical { samples } => {
            let n = samples.len() as f64;
            let mut k = 0;
            grid.iter()
                .map(|&x| {
                    while k < samples.len() && samples[k] <= x {
                        k += 1;
                    }
                    k as f64 / n
                })
                .collect()
        }
        _ => grid.iter().map(|&x| reference.cdf(x)).collect(),
    };
    let kl: Vec<f64> = refv.iter().zip(&approx).map(|(&f, &g)| kl_pointwise(f, g)).collect();
    let mut epsilon = 0.0;
    for i in 1..grid.len() {
        epsilon += 0.5 * (kl[i] + kl[i - 1]) * (grid[i] - grid[i - 1]);
    }
    Ok(ErrorProfile { grid: grid.to_vec(), reference: refv, approx, kl, epsilon })
}

/// `ε = ∫ D_KL dx` by the trapezoidal rule on the configured grid.
pub fn total_error<F>(reference: &ReferenceCdf, approx_cdf: F, cfg: &GridConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let grid = integration_grid(reference, cfg)?;
    let approx = grid.iter().map(|&x| approx_cdf(x)).collect();
    Ok(error_profile(reference, &grid, approx)?.epsilon)
}
