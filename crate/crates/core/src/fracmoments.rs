//! Absolute fractional moments `E[|Y|^r]`.
//!
//! The PCE route never samples the true model: the first four moments come
//! from the coefficients and each fractional order `r` is bracketed by the
//! nearest integer order `s` through Hölder's inequality,
//! `E[|Y|^r] ≈ (E[|Y|^s])^{r/s}`. For `r < s` this is an upper bound, for
//! `r > s` a lower bound, and it is exact at integer `r`.
//!
//! A Taylor expansion of `|y|^r` about the mean shows why fractional moments
//! are informative: `E[|Y|^r]` mixes contributions from every integer central
//! moment, with higher orders weighted more heavily as `r` grows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pce::{eval_pce, moments_from_pce_with, MomentOptions, MomentSet, PceModel};
use crate::sampling::sample_germ;

/// Orders used throughout the benchmark, clustered around the integer moments.
pub const DEFAULT_ORDERS: [f64; 8] = [1.1, 1.2, 1.8, 1.9, 2.1, 2.2, 2.9, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentSource {
    PceHolder,
    SampleEstimate,
}

/// Where the absolute integer moments feeding the Hölder step came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityDiagnostics {
    /// Fraction of surrogate samples with `Y <= 0`.
    pub nonpositive_fraction: f64,
    pub check_samples: usize,
    /// True when raw analytic moments were used as absolute moments.
    pub analytic_absolute: bool,
    /// Absolute integer moments `E[|Y|^k]`, k = 1..4, actually used.
    pub absolute_moments: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalMomentSet {
    pub orders: Vec<f64>,
    pub values: Vec<f64>,
    pub source: MomentSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positivity: Option<PositivityDiagnostics>,
}

impl FractionalMomentSet {
    pub fn new(orders: Vec<f64>, values: Vec<f64>, source: MomentSource) -> Result<Self> {
        validate_orders(&orders)?;
        if orders.len() != values.len() {
            return Err(Error::Dimension { expected: orders.len(), got: values.len() });
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::domain(format!("fractional moment value {v} must be finite and >= 0")));
        }
        Ok(Self { orders, values, source, positivity: None })
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// `E[|Y|^r]^{1/r}` per order.
    pub fn norms(&self) -> Vec<f64> {
        self.orders
            .iter()
            .zip(&self.values)
            .map(|(r, v)| v.powf(1.0 / r))
            .collect()
    }

    /// Lyapunov's inequality: the `r`-norms of a genuine distribution are
    /// nondecreasing in `r`.
    pub fn is_lyapunov_monotone(&self, rel_tol: f64) -> bool {
        self.norms().windows(2).all(|w| w[1] >= w[0] * (1.0 - rel_tol))
    }
}

fn validate_orders(orders: &[f64]) -> Result<()> {
    if orders.is_empty() {
        return Err(Error::domain("at least one fractional order is required"));
    }
    if orders.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::domain("fractional orders must be finite and non-negative"));
    }
    if orders.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("fractional orders must be strictly increasing"));
    }
    Ok(())
}

/// Nearest integer order; halves round up.
pub fn nearest_integer_order(r: f64) -> usize {
    (r + 0.5).floor() as usize
}

/// Hölder estimate from absolute integer moments `abs[k-1] = E[|Y|^k]`.
pub fn holder_from_absolute(abs: &[f64; 4], r: f64) -> Result<f64> {
    if !(1.0..=4.0).contains(&r) {
        return Err(Error::domain(format!("Hölder estimate needs 1 <= r <= 4, got {r}")));
    }
    let s = nearest_integer_order(r).clamp(1, 4);
    let m = abs[s - 1];
    if !(m >= 0.0) {
        return Err(Error::Internal(format!("absolute moment of order {s} is {m}")));
    }
    if r == s as f64 {
        return Ok(m);
    }
    Ok(m.powf(r / s as f64))
}

/// Hölder estimate treating the raw moments of `moments` as absolute moments.
pub fn holder_estimate(moments: &MomentSet, r: f64) -> Result<f64> {
    holder_from_absolute(&moments.raw, r)
}

/// Settings for [`fractional_moments_from_pce_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolderOptions {
    pub positivity_samples: usize,
    /// Largest tolerated `P(Y <= 0)` for using raw moments as absolute ones.
    pub positivity_threshold: f64,
    pub absolute_samples: usize,
    pub seed: u64,
    pub moments: MomentOptions,
}

impl Default for HolderOptions {
    fn default() -> Self {
        Self {
            positivity_samples: 100_000,
            positivity_threshold: 1e-4,
            absolute_samples: 1_000_000,
            seed: 0x0b5e_55ed,
            moments: MomentOptions::default(),
        }
    }
}

pub fn fractional_moments_from_pce(model: &PceModel, orders: &[f64]) -> Result<FractionalMomentSet> {
    fractional_moments_from_pce_with(model, orders, &HolderOptions::default())
}

/// Analytic moments of the surrogate, a positivity check on germ samples,
/// then one Hölder estimate per order.
pub fn fractional_moments_from_pce_with(
    model: &PceModel,
    orders: &[f64],
    opts: &HolderOptions,
) -> Result<FractionalMomentSet> {
    validate_orders(orders)?;
    if let Some(r) = orders.iter().find(|r| !(1.0..=4.0).contains(*r)) {
        return Err(Error::domain(format!("order {r} outside [1, 4]")));
    }
    let moments = moments_from_pce_with(model, &opts.moments)?;

    let check = sample_germ(&model.germ, opts.positivity_samples.max(1), opts.seed)?;
    let y = eval_pce(model, &check)?;
    let nonpositive = y.iter().filter(|&&v| v <= 0.0).count() as f64 / y.len() as f64;

    let (analytic_absolute, abs) = if nonpositive <= opts.positivity_threshold {
        (true, moments.raw)
    } else {
        (false, sampled_absolute_moments(model, opts)?)
    };
    let values = orders
        .iter()
        .map(|&r| holder_from_absolute(&abs, r))
        .collect::<Result<Vec<_>>>()?;
    let mut set = FractionalMomentSet::new(orders.to_vec(), values, MomentSource::PceHolder)?;
    set.positivity = Some(PositivityDiagnostics {
        nonpositive_fraction: nonpositive,
        check_samples: y.len(),
        analytic_absolute,
        absolute_moments: abs,
    });
    Ok(set)
}

fn sampled_absolute_moments(model: &PceModel, opts: &HolderOptions) -> Result<[f64; 4]> {
    let n = opts.absolute_samples.max(1);
    let chunk = 100_000;
    let mut acc = [0.0; 4];
    let mut done = 0;
    let mut block = 1u64;
    while done < n {
        let k = chunk.min(n - done);
        let xi = sample_germ(&model.germ, k, opts.seed.wrapping_add(block.wrapping_mul(0x9e37_79b9)))?;
        for v in eval_pce(model, &xi)? {
            let a = v.abs();
            let a2 = a * a;
            acc[0] += a;
            acc[1] += a2;
            acc[2] += a2 * a;
            acc[3] += a2 * a2;
        }
        done += k;
        block += 1;
    }
    Ok(acc.map(|s| s / n as f64))
}

/// Plain sample averages `(1/n) Σ |y_i|^r`.
pub fn fractional_moments_from_samples(y: &[f64], orders: &[f64]) -> Result<FractionalMomentSet> {
    if y.is_empty() {
        return Err(Error::domain("need at least one sample"));
    }
    if let Some(v) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("sample value {v}")));
    }
    validate_orders(orders)?;
    let n = y.len() as f64;
    let values = orders
        .iter()
        .map(|&r| y.iter().map(|v| v.abs().powf(r)).sum::<f64>() / n)
        .collect();
    FractionalMomentSet::new(orders.to_vec(), values, MomentSource::SampleEstimate)
}

/// Predicted size of the Hölder estimation bias: the norm over orders of
/// `r |r - s| v / 2`, where `v ≈ Var(Y) / E[Y]²` stands in for `Var(ln|Y|)`.
///
/// This is the second-order gap in the log-convexity of `r ↦ ln E|Y|^r`; it
/// is the mismatch any non-degenerate distribution leaves against the
/// estimated targets.
pub fn holder_bias_norm(mean: f64, variance: f64, orders: &[f64]) -> f64 {
    if mean == 0.0 {
        return f64::INFINITY;
    }
    let v = variance / (mean * mean);
    orders
        .iter()
        .map(|&r| {
            let s = nearest_integer_order(r) as f64;
            let g = 0.5 * r * (r - s).abs() * v;
            g * g
        })
        .sum::<f64>()
        .sqrt()
}

/// Norm over orders of the relative standard errors of the sample means
/// `(1/n) Σ |y_i|^r`.
pub fn sample_standard_error_norm(y: &[f64], orders: &[f64]) -> f64 {
    let n = y.len() as f64;
    if y.len() < 2 {
        return f64::INFINITY;
    }
    orders
        .iter()
        .map(|&r| {
            let vals: Vec<f64> = y.iter().map(|v| v.abs().powf(r)).collect();
            let mean = vals.iter().sum::<f64>() / n;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            if mean > 0.0 {
                var / (n * mean * mean)
            } else {
                f64::INFINITY
            }
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pce::MomentMethod;
    use crate::polybasis::{total_degree_set, GermFamily, GermSpec};
    use crate::quadrature::integrate;
    use crate::special::norm_pdf;

    fn gaussian_sum_moments() -> MomentSet {
        MomentSet::from_central(50.0, 12.0, 0.0, 3.0 * 144.0, MomentMethod::Analytic)
    }

    fn gaussian_sum_model() -> PceModel {
        let basis = total_degree_set(3, 1).unwrap();
        PceModel::from_coefficients(
            GermSpec::uniform(GermFamily::Hermite, 3).unwrap(),
            basis,
            vec![50.0, 2.0, 2.0, 2.0],
        )
        .unwrap()
    }

    /// E|Y|^r for Y ~ N(50, 12) by adaptive quadrature.
    fn normal_abs_moment(r: f64) -> f64 {
        let s = 12f64.sqrt();
        integrate(|y: f64| y.abs().powf(r) * norm_pdf((y - 50.0) / s) / s, 50.0 - 40.0 * s, 50.0 + 40.0 * s, 1e-12, 1e-14)
            .value
    }

    #[test]
    fn integer_orders_pass_through() {
        let m = gaussian_sum_moments();
        assert_eq!(holder_estimate(&m, 2.0).unwrap(), 2512.0);
        for k in 1..=4 {
            assert_eq!(holder_estimate(&m, k as f64).unwrap(), m.raw[k - 1]);
        }
    }

    #[test]
    fn bound_directions_for_gaussian_sum() {
        let m = gaussian_sum_moments();
        let e19 = holder_estimate(&m, 1.9).unwrap();
        assert!((e19 - 2512f64.powf(0.95)).abs() < 1e-9);
        let true19 = normal_abs_moment(1.9);
        assert!((true19 - 1697.5475).abs() < 0.05, "{true19}");
        assert!(e19 > true19);
        let e21 = holder_estimate(&m, 2.1).unwrap();
        assert!((e21 - 2512f64.powf(1.05)).abs() < 1e-9);
        assert!(e21 < normal_abs_moment(2.1));
    }

    #[test]
    fn order_range_is_enforced() {
        let m = gaussian_sum_moments();
        assert!(holder_estimate(&m, 0.9).is_err());
        assert!(holder_estimate(&m, 4.1).is_err());
        assert!(holder_estimate(&m, 4.0).is_ok());
        let mut bad = m;
        bad.raw[0] = -1.0;
        assert!(matches!(holder_estimate(&bad, 1.1), Err(Error::Internal(_))));
    }

    #[test]
    fn ties_round_up() {
        assert_eq!(nearest_integer_order(1.5), 2);
        assert_eq!(nearest_integer_order(2.49), 2);
        assert_eq!(nearest_integer_order(3.5), 4);
    }

    #[test]
    fn from_pce_gaussian_sum() {
        let set = fractional_moments_from_pce(&gaussian_sum_model(), &DEFAULT_ORDERS).unwrap();
        assert_eq!(set.source, MomentSource::PceHolder);
        let m3 = *set.values.last().unwrap();
        assert!((m3 / 126_800.0 - 1.0).abs() < 1e-6);
        let diag = set.positivity.unwrap();
        assert!(diag.analytic_absolute);
        assert_eq!(diag.nonpositive_fraction, 0.0);

        let only2 = fractional_moments_from_pce(&gaussian_sum_model(), &[2.0]).unwrap();
        assert!((only2.values[0] - 2512.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_response() {
        let basis = total_degree_set(2, 1).unwrap();
        let m = PceModel::from_coefficients(
            GermSpec::uniform(GermFamily::Legendre, 2).unwrap(),
            basis,
            vec![3.0, 0.0, 0.0],
        )
        .unwrap();
        let set = fractional_moments_from_pce(&m, &DEFAULT_ORDERS).unwrap();
        for (r, v) in set.orders.iter().zip(&set.values) {
            assert!((v / 3f64.powf(*r) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn signed_response_falls_back_to_sampling() {
        // Y = ξ, half the mass is negative
        let basis = total_degree_set(1, 1).unwrap();
        let m = PceModel::from_coefficients(
            GermSpec::uniform(GermFamily::Hermite, 1).unwrap(),
            basis,
            vec![0.0, 1.0],
        )
        .unwrap();
        let opts = HolderOptions { absolute_samples: 200_000, ..Default::default() };
        let set = fractional_moments_from_pce_with(&m, &[1.0, 2.0, 3.0], &opts).unwrap();
        let diag = set.positivity.unwrap();
        assert!(!diag.analytic_absolute);
        assert!(diag.nonpositive_fraction > 0.4);
        // E|ξ| = √(2/π), E ξ² = 1, E|ξ|³ = 2√(2/π)
        let c = (2.0 / std::f64::consts::PI).sqrt();
        assert!((set.values[0] - c).abs() < 5e-3);
        assert!((set.values[1] - 1.0).abs() < 5e-3);
        assert!((set.values[2] - 2.0 * c).abs() < 2e-2);
    }

    #[test]
    fn sample_estimates() {
        let s = fractional_moments_from_samples(&[1.0, 1.0, 1.0], &[2.5]).unwrap();
        assert_eq!(s.values, vec![1.0]);
        assert_eq!(s.source, MomentSource::SampleEstimate);
        assert_eq!(fractional_moments_from_samples(&[2.0], &[2.0]).unwrap().values, vec![4.0]);
        assert!(fractional_moments_from_samples(&[], &[2.0]).is_err());
        assert!(fractional_moments_from_samples(&[1.0], &[2.0, 1.0]).is_err());
    }

    #[test]
    fn sample_estimate_of_normal() {
        use crate::special::norm_inv_cdf;
        let n = 1_000_000;
        let s = 12f64.sqrt();
        let u = crate::sampling::lhs(n, 1, 77).unwrap();
        let y: Vec<f64> = u.iter().map(|&p| 50.0 + s * norm_inv_cdf(p)).collect();
        let set = fractional_moments_from_samples(&y, &[1.9]).unwrap();
        assert!((set.values[0] / 1697.5475 - 1.0).abs() < 1e-3);
        let many = fractional_moments_from_samples(&y, &DEFAULT_ORDERS).unwrap();
        assert!(many.is_lyapunov_monotone(0.0));
    }

    #[test]
    fn json_shape() {
        let set = fractional_moments_from_pce(&gaussian_sum_model(), &[1.1, 2.0]).unwrap();
        let v: serde_json::Value = serde_json::to_value(&set).unwrap();
        assert_eq!(v["source"], "pce-holder");
        assert!(v["positivity"]["analytic_absolute"].as_bool().unwrap());
    }

    #[test]
    fn predicted_bias_matches_exact_gap() {
        let m = gaussian_sum_moments();
        let exact: f64 = DEFAULT_ORDERS
            .iter()
            .map(|&r| {
                let t = holder_estimate(&m, r).unwrap();
                ((normal_abs_moment(r) - t) / t).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        let predicted = holder_bias_norm(50.0, 12.0, &DEFAULT_ORDERS);
        assert!((predicted / exact - 1.0).abs() < 0.05, "{predicted} vs {exact}");
        assert_eq!(holder_bias_norm(50.0, 12.0, &[1.0, 2.0, 3.0]), 0.0);
    }

    #[test]
    fn standard_error_shrinks_with_sample_size() {
        let y: Vec<f64> = (0..400).map(|k| 1.0 + (k % 20) as f64 * 0.1).collect();
        let big = sample_standard_error_norm(&y, &DEFAULT_ORDERS);
        let small = sample_standard_error_norm(&y[..100], &DEFAULT_ORDERS);
        assert!(big < small && big > 0.0);
        assert!(sample_standard_error_norm(&[1.0], &[1.0]).is_infinite());
    }
}
