//! Orthonormal Hermite / Legendre polynomials, their Gauss rules, and
//! truncated multi-index sets.

mod multiindex;

pub use multiindex::{hyperbolic_set, total_degree_cardinality, total_degree_set, MultiIndex, MultiIndexSet};

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Univariate polynomial family of one germ coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GermFamily {
    /// Probabilists' Hermite, weight = standard normal density.
    Hermite,
    /// Legendre, weight = 1/2 on [-1, 1].
    Legendre,
}

/// Per-dimension germ families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GermSpec {
    families: Vec<GermFamily>,
}

impl GermSpec {
    pub fn new(families: Vec<GermFamily>) -> Result<Self> {
        if families.is_empty() {
            return Err(Error::domain("germ must have at least one dimension"));
        }
        Ok(Self { families })
    }

    pub fn uniform(family: GermFamily, dim: usize) -> Result<Self> {
        Self::new(vec![family; dim])
    }

    pub fn dim(&self) -> usize {
        self.families.len()
    }

    pub fn families(&self) -> &[GermFamily] {
        &self.families
    }
}

/// Value of the degree-`n` orthonormal polynomial of `family` at `xi`.
pub fn eval_orthonormal_1d(family: GermFamily, n: usize, xi: f64) -> f64 {
    let mut buf = vec![0.0; n + 1];
    eval_orthonormal_all(family, n, xi, &mut buf);
    buf[n]
}

/// Fills `out[k] = ψ_k(xi)` for `k = 0..=max_degree`.
pub fn eval_orthonormal_all(family: GermFamily, max_degree: usize, xi: f64, out: &mut [f64]) {
    debug_assert!(out.len() > max_degree);
    out[0] = 1.0;
    if max_degree == 0 {
        return;
    }
    match family {
        GermFamily::Hermite => {
            // ψ_{k+1} = (ξ ψ_k - √k ψ_{k-1}) / √(k+1)
            out[1] = xi;
            for k in 1..max_degree {
                let kf = k as f64;
                out[k + 1] = (xi * out[k] - kf.sqrt() * out[k - 1]) / (kf + 1.0).sqrt();
            }
        }
        GermFamily::Legendre => {
            // orthonormal three-term recurrence with a_k = (k+1)/√((2k+1)(2k+3))
            out[1] = 3f64.sqrt() * xi;
            for k in 1..max_degree {
                let kf = k as f64;
                let a_next = (kf + 1.0) / ((2.0 * kf + 1.0) * (2.0 * kf + 3.0)).sqrt();
                let a_prev = kf / ((2.0 * kf - 1.0) * (2.0 * kf + 1.0)).sqrt();
                out[k + 1] = (xi * out[k] - a_prev * out[k - 1]) / a_next;
            }
        }
    }
}

/// Gauss quadrature rule for a family's probability weight.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

const RULE_CACHE_MAX: usize = 64;

/// `n_points`-point Gauss rule (Golub–Welsch), exact for degree ≤ 2n-1; weights sum to 1.
pub fn gauss_rule(family: GermFamily, n_points: usize) -> Result<GaussRule> {
    if n_points == 0 {
        return Err(Error::domain("gauss rule needs at least one point"));
    }
    if n_points <= RULE_CACHE_MAX {
        static HERMITE: OnceLock<Vec<GaussRule>> = OnceLock::new();
        static LEGENDRE: OnceLock<Vec<GaussRule>> = OnceLock::new();
        let cache = match family {
            GermFamily::Hermite => &HERMITE,
            GermFamily::Legendre => &LEGENDRE,
        };
        let rules = cache.get_or_init(|| {
            (1..=RULE_CACHE_MAX).map(|n| golub_welsch(family, n)).collect()
        });
        return Ok(rules[n_points - 1].clone());
    }
    Ok(golub_welsch(family, n_points))
}

fn golub_welsch(family: GermFamily, n: usize) -> GaussRule {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let off = match family {
            GermFamily::Hermite => kf.sqrt(),
            GermFamily::Legendre => kf / (4.0 * kf * kf - 1.0).sqrt(),
        };
        jacobi[(k, k - 1)] = off;
        jacobi[(k - 1, k)] = off;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| (eig.eigenvalues[j], eig.eigenvectors[(0, j)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrize: both weights are even, so the rule must be too
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[j].1 + pairs[i].1);
        pairs[i] = (-x, w);
        pairs[j] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / total).collect(),
    }
}

/// Orthonormal polynomial values tabulated on a Gauss rule, for repeated
/// product-expectation queries of bounded degree.
#[derive(Debug, Clone)]
pub struct ProductTable {
    max_degree: usize,
    weights: Vec<f64>,
    // values[k * n_nodes + j] = ψ_k(x_j)
    values: Vec<f64>,
}

impl ProductTable {
    /// Table exact for products of up to four polynomials of degree ≤ `max_degree`.
    pub fn new(family: GermFamily, max_degree: usize) -> Self {
        let n_points = (4 * max_degree + 1).div_ceil(2).max(1);
        let rule = gauss_rule(family, n_points).expect("n_points >= 1");
        let n = rule.nodes.len();
        let mut values = vec![0.0; (max_degree + 1) * n];
        let mut buf = vec![0.0; max_degree + 1];
        for (j, &x) in rule.nodes.iter().enumerate() {
            eval_orthonormal_all(family, max_degree, x, &mut buf);
            for k in 0..=max_degree {
                values[k * n + j] = buf[k];
            }
        }
        Self { max_degree, weights: rule.weights, values }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `E[ψ_a ψ_b ψ_c ψ_d]`; pass zeros for unused slots (`ψ_0 = 1`).
    pub fn expect4(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.weights.len();
        let (ra, rb, rc, rd) = (
            &self.values[a * n..(a + 1) * n],
            &self.values[b * n..(b + 1) * n],
            &self.values[c * n..(c + 1) * n],
            &self.values[d * n..(d + 1) * n],
        );
        let mut s = 0.0;
        for j in 0..n {
            s += self.weights[j] * ra[j] * rb[j] * rc[j] * rd[j];
        }
        s
    }
}

/// `E[ψ_{d1} ψ_{d2} ...]` for 2 to 4 factors under the family weight.
///
/// Pairs return the Kronecker delta exactly; longer products use a Gauss rule
/// with `⌈(Σd + 1)/2⌉` points, which is exact for the integrand's degree.
pub fn product_expectation(family: GermFamily, degrees: &[usize]) -> Result<f64> {
    if !(2..=4).contains(&degrees.len()) {
        return Err(Error::domain(format!(
            "product expectation takes 2..=4 factors, got {}",
            degrees.len()
        )));
    }
    if degrees.len() == 2 {
        return Ok(if degrees[0] == degrees[1] { 1.0 } else { 0.0 });
    }
    let total: usize = degrees.iter().sum();
    let max = *degrees.iter().max().unwrap();
    if total % 2 == 1 || 2 * max > total {
        // odd integrand, or one factor orthogonal to the product of the rest
        return Ok(0.0);
    }
    let rule = gauss_rule(family, (total + 1).div_ceil(2))?;
    let mut buf = vec![0.0; max + 1];
    let mut s = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        eval_orthonormal_all(family, max, x, &mut buf);
        s += w * degrees.iter().map(|&d| buf[d]).product::<f64>();
    }
    Ok(s)
}
