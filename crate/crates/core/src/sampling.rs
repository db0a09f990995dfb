//! Latin hypercube designs.

use nalgebra::DMatrix;
use rand::distr::{Distribution, Open01};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::distributions::{to_germ, InputVector};
use crate::error::{Error, Result};
use crate::polybasis::{GermFamily, GermSpec};
use crate::special::norm_inv_cdf;

/// Inputs (physical and germ space) and model responses of one design.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentalDesign {
    pub x: DMatrix<f64>,
    pub xi: DMatrix<f64>,
    pub y: Vec<f64>,
    pub seed: u64,
}

impl ExperimentalDesign {
    pub fn from_parts(x: DMatrix<f64>, xi: DMatrix<f64>, y: Vec<f64>, seed: u64) -> Result<Self> {
        if x.nrows() != xi.nrows() {
            return Err(Error::Dimension { expected: x.nrows(), got: xi.nrows() });
        }
        if !y.is_empty() && y.len() != x.nrows() {
            return Err(Error::Dimension { expected: x.nrows(), got: y.len() });
        }
        if let Some(bad) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("response at row {bad}")));
        }
        Ok(Self { x, xi, y, seed })
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    /// Fills `y` by calling `model` on each physical row.
    pub fn evaluate<F>(&mut self, mut model: F) -> Result<()>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let mut row = vec![0.0; self.dim()];
        let mut y = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            for j in 0..self.dim() {
                row[j] = self.x[(i, j)];
            }
            let v = model(&row)?;
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("model response at row {i}")));
            }
            y.push(v);
        }
        self.y = y;
        Ok(())
    }
}

/// `n × m` Latin hypercube of uniforms in (0, 1): in every column exactly one
/// sample falls in each stratum `((k-1)/n, k/n)`, at a uniformly random position.
pub fn lhs(n: usize, m: usize, seed: u64) -> Result<DMatrix<f64>> {
    if n == 0 || m == 0 {
        return Err(Error::domain(format!("LHS needs n >= 1 and M >= 1 (got {n}, {m})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = DMatrix::zeros(n, m);
    let mut perm: Vec<usize> = (0..n).collect();
    let inv_n = 1.0 / n as f64;
    for j in 0..m {
        perm.shuffle(&mut rng);
        for (i, &stratum) in perm.iter().enumerate() {
            let offset: f64 = Open01.sample(&mut rng);
            u[(i, j)] = ((stratum as f64 + offset) * inv_n).min(1.0 - f64::EPSILON / 2.0);
        }
    }
    Ok(u)
}

/// LHS design of the physical inputs, with the germ coordinates filled in.
pub fn sample_inputs(inputs: &InputVector, n: usize, seed: u64) -> Result<ExperimentalDesign> {
    let germ = inputs.natural_germ();
    sample_inputs_with_germ(inputs, &germ, n, seed)
}

pub fn sample_inputs_with_germ(
    inputs: &InputVector,
    germ: &GermSpec,
    n: usize,
    seed: u64,
) -> Result<ExperimentalDesign> {
    let m = inputs.len();
    let u = lhs(n, m, seed)?;
    let mut x = DMatrix::zeros(n, m);
    let mut xi = DMatrix::zeros(n, m);
    let mut row = vec![0.0; m];
    for i in 0..n {
        for j in 0..m {
            row[j] = inputs.get(j).inverse_cdf(u[(i, j)])?;
            x[(i, j)] = row[j];
        }
        let z = to_germ(&row, inputs, germ)?;
        for j in 0..m {
            xi[(i, j)] = z[j];
        }
    }
    ExperimentalDesign::from_parts(x, xi, Vec::new(), seed)
}

/// LHS directly in the germ space (standard normal / uniform on [-1, 1]).
pub fn sample_germ(germ: &GermSpec, n: usize, seed: u64) -> Result<DMatrix<f64>> {
    let mut u = lhs(n, germ.dim(), seed)?;
    for (j, family) in germ.families().iter().enumerate() {
        for i in 0..n {
            let p = u[(i, j)];
            u[(i, j)] = match family {
                GermFamily::Hermite => norm_inv_cdf(p),
                GermFamily::Legendre => 2.0 * p - 1.0,
            };
        }
    }
    Ok(u)
}
