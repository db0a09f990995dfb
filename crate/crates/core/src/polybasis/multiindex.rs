use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-dimension polynomial degrees of one basis term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// `(Σ α_i^q)^{1/q}`.
    pub fn q_norm(&self, q: f64) -> f64 {
        self.0
            .iter()
            .filter(|&&a| a > 0)
            .map(|&a| (a as f64).powf(q))
            .sum::<f64>()
            .powf(1.0 / q)
    }

    pub fn degrees(&self) -> &[usize] {
        &self.0
    }
}

/// Truncated basis index set, graded-lexicographic with the zero index first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiIndexSet {
    indices: Vec<MultiIndex>,
    p: usize,
    q: f64,
}

impl MultiIndexSet {
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.indices[0].dim()
    }

    pub fn max_degree(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Largest single-dimension degree appearing in the set.
    pub fn max_univariate_degree(&self) -> usize {
        self.indices
            .iter()
            .flat_map(|a| a.0.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Rebuilds a set from explicit indices (e.g. a deserialized model),
    /// checking the set invariants.
    pub fn from_indices(indices: Vec<MultiIndex>, p: usize, q: f64) -> Result<Self> {
        let Some(first) = indices.first() else {
            return Err(Error::domain("empty index set"));
        };
        if !first.is_zero() {
            return Err(Error::domain("first multi-index must be the zero index"));
        }
        let dim = first.dim();
        let mut seen = std::collections::HashSet::new();
        for a in &indices {
            if a.dim() != dim {
                return Err(Error::Dimension { expected: dim, got: a.dim() });
            }
            if !seen.insert(a) {
                return Err(Error::domain(format!("duplicate multi-index {:?}", a.0)));
            }
            if a.q_norm(q) > p as f64 + 1e-9 {
                return Err(Error::domain(format!("multi-index {:?} exceeds q-norm bound", a.0)));
            }
        }
        Ok(Self { indices, p, q })
    }
}

/// `(M+p)! / (M! p!)` with overflow detection.
pub fn total_degree_cardinality(m: usize, p: usize) -> Option<usize> {
    // C(m+p, p) computed incrementally; each prefix is itself a binomial coefficient
    let mut c: usize = 1;
    for k in 1..=p {
        c = c.checked_mul(m + k)? / k;
    }
    Some(c)
}

/// All α with Σα ≤ p, graded lexicographic, zero index first.
pub fn total_degree_set(m: usize, p: usize) -> Result<MultiIndexSet> {
    if m == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let card = total_degree_cardinality(m, p)
        .filter(|&c| c <= 50_000_000)
        .ok_or_else(|| Error::Overflow(format!("card A^(M={m}, p={p}) too large")))?;
    let mut indices = Vec::with_capacity(card);
    for degree in 0..=p {
        let mut current = vec![0; m];
        compositions(degree, 0, &mut current, &mut indices);
    }
    debug_assert_eq!(indices.len(), card);
    Ok(MultiIndexSet { indices, p, q: 1.0 })
}

/// Emits all compositions of `remaining` into `current[pos..]` in lexicographic
/// order with the first coordinate largest first.
fn compositions(remaining: usize, pos: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    let m = current.len();
    if pos == m - 1 {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for v in (0..=remaining).rev() {
        current[pos] = v;
        compositions(remaining - v, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// All α with `‖α‖_q ≤ p`; `q = 1` reproduces [`total_degree_set`].
pub fn hyperbolic_set(m: usize, p: usize, q: f64) -> Result<MultiIndexSet> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::domain(format!("hyperbolic parameter q = {q} outside (0, 1]")));
    }
    let full = total_degree_set(m, p)?;
    if q == 1.0 {
        return Ok(full);
    }
    let bound = p as f64 * (1.0 + 1e-12);
    let indices = full
        .indices
        .into_iter()
        .filter(|a| a.q_norm(q) <= bound)
        .collect();
    Ok(MultiIndexSet { indices, p, q })
}
