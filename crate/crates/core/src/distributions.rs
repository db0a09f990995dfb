//! Input random variables and the isoprobabilistic map to the germ space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polybasis::{GermFamily, GermSpec};
use crate::special::{norm_cdf, norm_inv_cdf, norm_pdf, norm_sf};

/// Number of standard deviations used for the default truncation bounds.
pub const DEFAULT_TRUNCATION_SIGMAS: f64 = 4.0;

/// A scalar input random variable in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVariable", into = "RawVariable")]
pub enum InputVariable {
    Normal { mean: f64, std: f64 },
    TruncatedNormal { mean: f64, std: f64, lower: f64, upper: f64 },
    Uniform { lower: f64, upper: f64 },
}

impl InputVariable {
    pub fn normal(mean: f64, std: f64) -> Result<Self> {
        Self::Normal { mean, std }.validated()
    }

    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        Self::Uniform { lower, upper }.validated()
    }

    pub fn truncated_normal(mean: f64, std: f64, lower: f64, upper: f64) -> Result<Self> {
        Self::TruncatedNormal { mean, std, lower, upper }.validated()
    }

    /// Truncated normal on `[max(0, μ-4σ), μ+4σ]`.
    pub fn truncated_normal_default(mean: f64, std: f64) -> Result<Self> {
        let k = DEFAULT_TRUNCATION_SIGMAS;
        Self::truncated_normal(mean, std, (mean - k * std).max(0.0), mean + k * std)
    }

    /// Same as [`truncated_normal_default`](Self::truncated_normal_default) with `std = cov·mean`.
    pub fn truncated_normal_cov(mean: f64, cov: f64) -> Result<Self> {
        Self::truncated_normal_default(mean, cov * mean.abs())
    }

    fn validated(self) -> Result<Self> {
        match self {
            Self::Normal { mean, std } => {
                if !(mean.is_finite() && std.is_finite() && std > 0.0) {
                    return Err(Error::domain(format!("normal(mean={mean}, std={std})")));
                }
            }
            Self::TruncatedNormal { mean, std, lower, upper } => {
                if !(mean.is_finite() && std.is_finite() && std > 0.0) {
                    return Err(Error::domain(format!(
                        "truncated normal(mean={mean}, std={std})"
                    )));
                }
                if lower.is_nan() || upper.is_nan() || lower >= upper {
                    return Err(Error::domain(format!("truncation bounds [{lower}, {upper}]")));
                }
                let mass = norm_cdf((upper - mean) / std) - norm_cdf((lower - mean) / std);
                if mass <= 0.0 {
                    return Err(Error::domain("truncation interval carries no mass"));
                }
            }
            Self::Uniform { lower, upper } => {
                if !(lower.is_finite() && upper.is_finite() && lower < upper) {
                    return Err(Error::domain(format!("uniform on [{lower}, {upper}]")));
                }
            }
        }
        Ok(self)
    }

    /// Support `[lower, upper]`, possibly infinite.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Self::TruncatedNormal { lower, upper, .. } | Self::Uniform { lower, upper } => {
                (lower, upper)
            }
        }
    }

    /// Germ family paired with this variable by the Wiener–Askey scheme.
    pub fn natural_germ(&self) -> GermFamily {
        match self {
            Self::Uniform { .. } => GermFamily::Legendre,
            _ => GermFamily::Hermite,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Normal { mean, .. } => mean,
            Self::TruncatedNormal { mean, std, lower, upper } => {
                let (a, b) = ((lower - mean) / std, (upper - mean) / std);
                let z = tn_mass(a, b);
                mean + std * (norm_pdf(a) - norm_pdf(b)) / z
            }
            Self::Uniform { lower, upper } => 0.5 * (lower + upper),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mean, std } => norm_pdf((x - mean) / std) / std,
            Self::TruncatedNormal { mean, std, lower, upper } => {
                if x < lower || x > upper {
                    0.0
                } else {
                    let (a, b) = ((lower - mean) / std, (upper - mean) / std);
                    norm_pdf((x - mean) / std) / (std * tn_mass(a, b))
                }
            }
            Self::Uniform { lower, upper } => {
                if x < lower || x > upper {
                    0.0
                } else {
                    1.0 / (upper - lower)
                }
            }
        }
    }

    /// CDF, clamped to 0 / 1 outside the support.
    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf_pair(x).0
    }

    /// `(F(x), 1 - F(x))`, each computed without cancellation.
    fn cdf_pair(&self, x: f64) -> (f64, f64) {
        match *self {
            Self::Normal { mean, std } => {
                let z = (x - mean) / std;
                (norm_cdf(z), norm_sf(z))
            }
            Self::TruncatedNormal { mean, std, lower, upper } => {
                if x <= lower {
                    return (0.0, 1.0);
                }
                if x >= upper {
                    return (1.0, 0.0);
                }
                let (a, b) = ((lower - mean) / std, (upper - mean) / std);
                let z = (x - mean) / std;
                let mass = tn_mass(a, b);
                if z <= 0.0 {
                    let p = (norm_cdf(z) - norm_cdf(a)) / mass;
                    (p, 1.0 - p)
                } else {
                    let q = (norm_sf(z) - norm_sf(b)) / mass;
                    (1.0 - q, q)
                }
            }
            Self::Uniform { lower, upper } => {
                let p = ((x - lower) / (upper - lower)).clamp(0.0, 1.0);
                (p, 1.0 - p)
            }
        }
    }

    /// Quantile function on the open unit interval.
    pub fn inverse_cdf(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!("probability {u} outside (0, 1)")));
        }
        Ok(self.quantile_pair(u, 1.0 - u))
    }

    /// Quantile given both `p` and `q = 1 - p`; whichever is smaller drives the
    /// computation so tail quantiles keep full precision.
    fn quantile_pair(&self, p: f64, q: f64) -> f64 {
        match *self {
            Self::Normal { mean, std } => mean + std * std_normal_quantile(p, q),
            Self::TruncatedNormal { mean, std, lower, upper } => {
                let (a, b) = ((lower - mean) / std, (upper - mean) / std);
                let mass = tn_mass(a, b);
                let lo = norm_cdf(a) + p * mass;
                let z = if lo <= 0.5 {
                    if lo <= 0.0 {
                        a
                    } else {
                        norm_inv_cdf(lo)
                    }
                } else {
                    let hi = norm_sf(b) + q * mass;
                    if hi <= 0.0 {
                        b
                    } else {
                        -norm_inv_cdf(hi.min(0.5))
                    }
                };
                (mean + std * z).clamp(lower, upper)
            }
            Self::Uniform { lower, upper } => lower + p * (upper - lower),
        }
    }
}

/// Probability mass of the standard normal on `[a, b]`.
fn tn_mass(a: f64, b: f64) -> f64 {
    if a > 0.0 {
        norm_sf(a) - norm_sf(b)
    } else {
        norm_cdf(b) - norm_cdf(a)
    }
}

fn std_normal_quantile(p: f64, q: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if q <= 0.0 {
        f64::INFINITY
    } else if p <= 0.5 {
        norm_inv_cdf(p)
    } else {
        -norm_inv_cdf(q)
    }
}

/// Ordered list of mutually independent inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InputVector {
    variables: Vec<InputVariable>,
}

impl InputVector {
    pub fn new(variables: Vec<InputVariable>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::domain("input vector must hold at least one variable"));
        }
        Ok(Self { variables })
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[InputVariable] {
        &self.variables
    }

    pub fn get(&self, i: usize) -> &InputVariable {
        &self.variables[i]
    }

    pub fn natural_germ(&self) -> GermSpec {
        GermSpec::new(self.variables.iter().map(InputVariable::natural_germ).collect())
            .expect("non-empty input vector")
    }
}

fn check_dims(x: &[f64], inputs: &InputVector, germ: &GermSpec) -> Result<()> {
    if inputs.len() != germ.dim() {
        return Err(Error::Dimension { expected: inputs.len(), got: germ.dim() });
    }
    if x.len() != inputs.len() {
        return Err(Error::Dimension { expected: inputs.len(), got: x.len() });
    }
    Ok(())
}

/// Maps a physical realization to the germ space: `ξ_i = G_i⁻¹(F_{X_i}(x_i))`.
pub fn to_germ(x: &[f64], inputs: &InputVector, germ: &GermSpec) -> Result<Vec<f64>> {
    check_dims(x, inputs, germ)?;
    x.iter()
        .zip(inputs.variables())
        .zip(germ.families())
        .map(|((&xi, var), &family)| {
            let (lo, hi) = var.support();
            if !(xi > lo && xi < hi) {
                return Err(Error::domain(format!(
                    "x = {xi} outside the open support ({lo}, {hi})"
                )));
            }
            Ok(match (var, family) {
                (InputVariable::Normal { mean, std }, GermFamily::Hermite) => (xi - mean) / std,
                (InputVariable::Uniform { lower, upper }, GermFamily::Legendre) => {
                    2.0 * (xi - lower) / (upper - lower) - 1.0
                }
                (_, GermFamily::Hermite) => {
                    let (p, q) = var.cdf_pair(xi);
                    std_normal_quantile(p, q)
                }
                (_, GermFamily::Legendre) => {
                    let (p, q) = var.cdf_pair(xi);
                    if p <= 0.5 {
                        2.0 * p - 1.0
                    } else {
                        1.0 - 2.0 * q
                    }
                }
            })
        })
        .collect()
}

/// Inverse of [`to_germ`].
pub fn from_germ(xi: &[f64], inputs: &InputVector, germ: &GermSpec) -> Result<Vec<f64>> {
    check_dims(xi, inputs, germ)?;
    xi.iter()
        .zip(inputs.variables())
        .zip(germ.families())
        .map(|((&z, var), &family)| {
            if !z.is_finite() {
                return Err(Error::domain(format!("non-finite germ coordinate {z}")));
            }
            Ok(match (var, family) {
                (InputVariable::Normal { mean, std }, GermFamily::Hermite) => mean + std * z,
                (InputVariable::Uniform { lower, upper }, GermFamily::Legendre) => {
                    lower + 0.5 * (z + 1.0) * (upper - lower)
                }
                (_, GermFamily::Hermite) => var.quantile_pair(norm_cdf(z), norm_sf(z)),
                (_, GermFamily::Legendre) => {
                    let z = z.clamp(-1.0, 1.0);
                    var.quantile_pair(0.5 * (1.0 + z), 0.5 * (1.0 - z))
                }
            })
        })
        .collect()
}

/// Serialized form: infinite bounds are written as the strings `"-inf"` / `"inf"`,
/// and a truncated normal may be given by `cov` instead of `std` and may omit its
/// bounds (defaulting to `[max(0, μ-4σ), μ+4σ]`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariable {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cov: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lower: Option<Bound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upper: Option<Bound>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum Bound {
    Value(f64),
    Named(InfBound),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
enum InfBound {
    #[serde(rename = "-inf")]
    NegInf,
    #[serde(rename = "inf")]
    Inf,
}

impl From<f64> for Bound {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            Bound::Named(InfBound::Inf)
        } else if v == f64::NEG_INFINITY {
            Bound::Named(InfBound::NegInf)
        } else {
            Bound::Value(v)
        }
    }
}

impl Bound {
    fn value(self) -> f64 {
        match self {
            Bound::Value(v) => v,
            Bound::Named(InfBound::Inf) => f64::INFINITY,
            Bound::Named(InfBound::NegInf) => f64::NEG_INFINITY,
        }
    }
}

impl TryFrom<RawVariable> for InputVariable {
    type Error = String;

    fn try_from(raw: RawVariable) -> std::result::Result<Self, String> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| format!("missing field `{name}`"));
        let std_of = |mean: f64| -> std::result::Result<f64, String> {
            match (raw.std, raw.cov) {
                (Some(s), None) => Ok(s),
                (None, Some(c)) => Ok(c * mean.abs()),
                (Some(_), Some(_)) => Err("give either `std` or `cov`, not both".into()),
                (None, None) => Err("missing field `std` (or `cov`)".into()),
            }
        };
        let var = match raw.kind.as_str() {
            "normal" => {
                let mean = need(raw.mean, "mean")?;
                InputVariable::normal(mean, std_of(mean)?)
            }
            "truncated-normal" => {
                let mean = need(raw.mean, "mean")?;
                let std = std_of(mean)?;
                let k = DEFAULT_TRUNCATION_SIGMAS;
                let lower = raw.lower.map_or((mean - k * std).max(0.0), Bound::value);
                let upper = raw.upper.map_or(mean + k * std, Bound::value);
                InputVariable::truncated_normal(mean, std, lower, upper)
            }
            "uniform" => InputVariable::uniform(
                need(raw.lower.map(Bound::value), "lower")?,
                need(raw.upper.map(Bound::value), "upper")?,
            ),
            other => return Err(format!("unknown variable kind `{other}`")),
        };
        var.map_err(|e| e.to_string())
    }
}

impl From<InputVariable> for RawVariable {
    fn from(v: InputVariable) -> Self {
        let blank = RawVariable {
            kind: String::new(),
            mean: None,
            std: None,
            cov: None,
            lower: None,
            upper: None,
        };
        match v {
            InputVariable::Normal { mean, std } => RawVariable {
                kind: "normal".into(),
                mean: Some(mean),
                std: Some(std),
                ..blank
            },
            InputVariable::TruncatedNormal { mean, std, lower, upper } => RawVariable {
                kind: "truncated-normal".into(),
                mean: Some(mean),
                std: Some(std),
                lower: Some(lower.into()),
                upper: Some(upper.into()),
                ..blank
            },
            InputVariable::Uniform { lower, upper } => RawVariable {
                kind: "uniform".into(),
                lower: Some(lower.into()),
                upper: Some(upper.into()),
                ..blank
            },
        }
    }
}
