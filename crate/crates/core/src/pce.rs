//! Polynomial chaos expansion: least-squares fit, accuracy measures and
//! statistical moments from the coefficients.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polybasis::{eval_orthonormal_all, GermSpec, MultiIndexSet, ProductTable};
use crate::sampling::{sample_germ, ExperimentalDesign};

/// A fitted expansion `Y ≈ Σ β_α Ψ_α(ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PceModel {
    pub germ: GermSpec,
    pub basis: MultiIndexSet,
    pub beta: Vec<f64>,
    /// Coefficient of determination on the training design.
    pub r2: Option<f64>,
    /// Analytic leave-one-out accuracy; `None` when `n <= P` or a leverage is singular.
    pub q2: Option<f64>,
}

impl PceModel {
    /// Builds a model from given coefficients (no fit diagnostics).
    pub fn from_coefficients(germ: GermSpec, basis: MultiIndexSet, beta: Vec<f64>) -> Result<Self> {
        if beta.len() != basis.len() {
            return Err(Error::Dimension { expected: basis.len(), got: beta.len() });
        }
        if germ.dim() != basis.dim() {
            return Err(Error::Dimension { expected: basis.dim(), got: germ.dim() });
        }
        Ok(Self { germ, basis, beta, r2: None, q2: None })
    }

    pub fn mean(&self) -> f64 {
        self.beta[0]
    }

    pub fn variance(&self) -> f64 {
        self.beta[1..].iter().map(|b| b * b).sum()
    }
}

/// Row-wise basis evaluation with reusable per-dimension buffers.
struct BasisEvaluator<'a> {
    basis: &'a MultiIndexSet,
    germ: &'a GermSpec,
    max_deg: usize,
    univariate: Vec<f64>,
}

impl<'a> BasisEvaluator<'a> {
    fn new(basis: &'a MultiIndexSet, germ: &'a GermSpec) -> Self {
        let max_deg = basis.max_univariate_degree();
        Self {
            basis,
            germ,
            max_deg,
            univariate: vec![0.0; germ.dim() * (max_deg + 1)],
        }
    }

    fn row(&mut self, xi: impl Iterator<Item = f64>, out: &mut [f64]) {
        let stride = self.max_deg + 1;
        for (j, (x, &family)) in xi.zip(self.germ.families()).enumerate() {
            eval_orthonormal_all(
                family,
                self.max_deg,
                x,
                &mut self.univariate[j * stride..(j + 1) * stride],
            );
        }
        for (o, alpha) in out.iter_mut().zip(self.basis.indices()) {
            *o = alpha
                .degrees()
                .iter()
                .enumerate()
                .map(|(j, &d)| self.univariate[j * stride + d])
                .product();
        }
    }
}

fn check_germ(basis: &MultiIndexSet, germ: &GermSpec, xi: &DMatrix<f64>) -> Result<()> {
    if germ.dim() != basis.dim() {
        return Err(Error::Dimension { expected: basis.dim(), got: germ.dim() });
    }
    if xi.ncols() != basis.dim() {
        return Err(Error::Dimension { expected: basis.dim(), got: xi.ncols() });
    }
    Ok(())
}

/// Data matrix `Ψ_ij = Ψ_j(ξ^(i))`.
pub fn design_matrix(basis: &MultiIndexSet, germ: &GermSpec, xi: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_germ(basis, germ, xi)?;
    if xi.nrows() == 0 {
        return Err(Error::domain("design matrix needs at least one sample"));
    }
    let (n, p) = (xi.nrows(), basis.len());
    let mut psi = DMatrix::zeros(n, p);
    let mut eval = BasisEvaluator::new(basis, germ);
    let mut row = vec![0.0; p];
    for i in 0..n {
        eval.row(xi.row(i).iter().copied(), &mut row);
        for j in 0..p {
            psi[(i, j)] = row[j];
        }
    }
    Ok(psi)
}

/// Evaluates the expansion at each row of `xi`.
pub fn eval_pce(model: &PceModel, xi: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_germ(&model.basis, &model.germ, xi)?;
    let mut eval = BasisEvaluator::new(&model.basis, &model.germ);
    let mut row = vec![0.0; model.basis.len()];
    Ok((0..xi.nrows())
        .map(|i| {
            eval.row(xi.row(i).iter().copied(), &mut row);
            row.iter().zip(&model.beta).map(|(a, b)| a * b).sum()
        })
        .collect())
}

fn population_variance(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
}

struct LeastSquares {
    beta: DVector<f64>,
    /// Thin left singular vectors spanning the column space of Ψ.
    u: DMatrix<f64>,
}

fn solve_least_squares(psi: DMatrix<f64>, y: &DVector<f64>) -> Result<LeastSquares> {
    let (n, p) = psi.shape();
    if n < p {
        return Err(Error::RankDeficient { rank: n, columns: p });
    }
    let svd = psi.svd(true, true);
    let s_max = svd.singular_values.max();
    let tol = (n.max(p) as f64) * f64::EPSILON * s_max;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < p || s_max == 0.0 {
        return Err(Error::RankDeficient { rank, columns: p });
    }
    let u = svd.u.clone().expect("computed");
    let beta = svd
        .solve(y, tol)
        .map_err(|e| Error::Internal(format!("SVD solve failed: {e}")))?;
    Ok(LeastSquares { beta, u })
}

/// Leverages `h_ii` from orthonormal column-space vectors.
fn leverages(u: &DMatrix<f64>) -> Vec<f64> {
    u.row_iter().map(|r| r.norm_squared()).collect()
}

fn loo_from_parts(y: &[f64], fitted: &[f64], h: &[f64]) -> Result<f64> {
    let var = population_variance(y);
    if var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let mut press = 0.0;
    for (i, ((&yi, &fi), &hi)) in y.iter().zip(fitted).zip(h).enumerate() {
        if hi >= 1.0 - 1e-12 {
            return Err(Error::Leverage { row: i, leverage: hi });
        }
        press += ((yi - fi) / (1.0 - hi)).powi(2);
    }
    Ok(1.0 - press / y.len() as f64 / var)
}

/// Ordinary least-squares fit of the expansion on a design, via SVD.
pub fn fit_ols(ed: &ExperimentalDesign, basis: &MultiIndexSet, germ: &GermSpec) -> Result<PceModel> {
    if ed.y.len() != ed.len() || ed.is_empty() {
        return Err(Error::Dimension { expected: ed.len(), got: ed.y.len() });
    }
    let psi = design_matrix(basis, germ, &ed.xi)?;
    let y = DVector::from_column_slice(&ed.y);
    let ls = solve_least_squares(psi.clone(), &y)?;
    let fitted: Vec<f64> = (&psi * &ls.beta).iter().copied().collect();
    let var = population_variance(&ed.y);
    let r2 = (var > 0.0).then(|| {
        let mse = ed.y.iter().zip(&fitted).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / ed.len() as f64;
        1.0 - mse / var
    });
    let q2 = if ed.len() > basis.len() {
        loo_from_parts(&ed.y, &fitted, &leverages(&ls.u)).ok()
    } else {
        None
    };
    Ok(PceModel {
        germ: germ.clone(),
        basis: basis.clone(),
        beta: ls.beta.iter().copied().collect(),
        r2,
        q2,
    })
}

/// `1 - MSE / Var(Y)` of the surrogate on a validation design.
pub fn r_squared(model: &PceModel, validation: &ExperimentalDesign) -> Result<f64> {
    if validation.is_empty() || validation.y.len() != validation.len() {
        return Err(Error::domain("validation design must be non-empty with responses"));
    }
    let var = population_variance(&validation.y);
    if var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let pred = eval_pce(model, &validation.xi)?;
    let mse = validation
        .y
        .iter()
        .zip(&pred)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / validation.len() as f64;
    Ok(1.0 - mse / var)
}

/// Analytic leave-one-out accuracy `Q² = 1 - mean((e_i / (1 - h_ii))²) / Var(Y)`
/// of the model's basis refitted on `training`.
pub fn q_squared_loo(model: &PceModel, training: &ExperimentalDesign) -> Result<f64> {
    if training.y.len() != training.len() || training.is_empty() {
        return Err(Error::Dimension { expected: training.len(), got: training.y.len() });
    }
    if population_variance(&training.y) == 0.0 {
        return Err(Error::ZeroVariance);
    }
    if training.len() <= model.basis.len() {
        return Err(Error::domain(format!(
            "leave-one-out needs n > P (n = {}, P = {})",
            training.len(),
            model.basis.len()
        )));
    }
    let psi = design_matrix(&model.basis, &model.germ, &training.xi)?;
    let y = DVector::from_column_slice(&training.y);
    let ls = solve_least_squares(psi.clone(), &y)?;
    let fitted: Vec<f64> = (&psi * &ls.beta).iter().copied().collect();
    loo_from_parts(&training.y, &fitted, &leverages(&ls.u))
}

/// How the third and fourth central moments were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MomentMethod {
    /// Exact sums over products of basis functions.
    Analytic,
    /// Surrogate evaluated on germ samples (basis larger than the summation cap).
    Sampled { samples: usize, seed: u64 },
}

/// First four moments of the response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean: f64,
    pub variance: f64,
    /// Standardized third central moment.
    pub skewness: f64,
    /// Standardized fourth central moment, non-excess (Gaussian = 3).
    pub kurtosis: f64,
    /// Raw moments `E[Y^k]`, k = 1..4.
    pub raw: [f64; 4],
    pub method: MomentMethod,
}

impl MomentSet {
    /// Builds the set from mean and central moments 2..4.
    ///
    /// For zero variance skewness is reported as 0 and kurtosis as 1.
    pub fn from_central(mean: f64, c2: f64, c3: f64, c4: f64, method: MomentMethod) -> Self {
        let (skewness, kurtosis) = if c2 > 0.0 {
            (c3 / c2.powf(1.5), c4 / (c2 * c2))
        } else {
            (0.0, 1.0)
        };
        let m = mean;
        let raw = [
            m,
            c2 + m * m,
            c3 + 3.0 * m * c2 + m.powi(3),
            c4 + 4.0 * m * c3 + 6.0 * m * m * c2 + m.powi(4),
        ];
        Self { mean, variance: c2, skewness, kurtosis, raw, method }
    }

    pub fn std(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn central3(&self) -> f64 {
        self.skewness * self.variance.powf(1.5)
    }

    pub fn central4(&self) -> f64 {
        self.kurtosis * self.variance * self.variance
    }
}

/// Settings for [`moments_from_pce_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentOptions {
    /// Largest number of non-constant terms summed exhaustively.
    pub max_terms: usize,
    /// Germ samples used beyond the cap.
    pub fallback_samples: usize,
    pub fallback_seed: u64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self { max_terms: 80, fallback_samples: 1_000_000, fallback_seed: 0x5eed_0f_4d0e }
    }
}

/// First four moments with default options.
pub fn moments_from_pce(model: &PceModel) -> Result<MomentSet> {
    moments_from_pce_with(model, &MomentOptions::default())
}

/// Mean `β_0`, variance `Σ β_α²`, and the third/fourth central moments as
/// sums of `β` products times expectations of basis-function products.
pub fn moments_from_pce_with(model: &PceModel, opts: &MomentOptions) -> Result<MomentSet> {
    let mean = model.mean();
    let c2 = model.variance();
    let active: Vec<usize> = (1..model.beta.len()).filter(|&i| model.beta[i] != 0.0).collect();
    if active.len() > opts.max_terms {
        let (c3, c4) = sampled_central_moments(model, opts)?;
        return Ok(MomentSet::from_central(
            mean,
            c2,
            c3,
            c4,
            MomentMethod::Sampled { samples: opts.fallback_samples, seed: opts.fallback_seed },
        ));
    }
    let (c3, c4) = analytic_central_moments(model, &active);
    Ok(MomentSet::from_central(mean, c2, c3, c4, MomentMethod::Analytic))
}

fn analytic_central_moments(model: &PceModel, active: &[usize]) -> (f64, f64) {
    let dim = model.germ.dim();
    let max_deg = model.basis.max_univariate_degree();
    let tables: Vec<ProductTable> = model
        .germ
        .families()
        .iter()
        .map(|&f| ProductTable::new(f, max_deg))
        .collect();
    let alphas: Vec<&[usize]> = active.iter().map(|&i| model.basis.indices()[i].degrees()).collect();
    let beta: Vec<f64> = active.iter().map(|&i| model.beta[i]).collect();
    let parity: Vec<u64> = alphas
        .iter()
        .map(|a| {
            a.iter()
                .enumerate()
                .fold(0u64, |acc, (j, &d)| acc | (((d & 1) as u64) << (j % 64)))
        })
        .collect();
    let t = alphas.len();

    let expect = |idx: [usize; 4], len: usize| -> f64 {
        let mut prod = 1.0;
        for j in 0..dim {
            let deg = |k: usize| if k < len { alphas[idx[k]][j] } else { 0 };
            let v = tables[j].expect4(deg(0), deg(1), deg(2), deg(3));
            if v == 0.0 {
                return 0.0;
            }
            prod *= v;
        }
        prod
    };

    // sorted tuples a <= b <= c (<= d) weighted by their number of distinct orderings
    let mut c3 = 0.0;
    let mut c4 = 0.0;
    for a in 0..t {
        for b in a..t {
            let pab = parity[a] ^ parity[b];
            let bab = beta[a] * beta[b];
            for c in b..t {
                let pabc = pab ^ parity[c];
                if pabc == 0 {
                    let mult = match (a == b, b == c) {
                        (true, true) => 1.0,
                        (false, false) => 6.0,
                        _ => 3.0,
                    };
                    c3 += mult * bab * beta[c] * expect([a, b, c, 0], 3);
                }
                let babc = bab * beta[c];
                for d in c..t {
                    if pabc ^ parity[d] != 0 {
                        continue;
                    }
                    let e = expect([a, b, c, d], 4);
                    if e == 0.0 {
                        continue;
                    }
                    c4 += multiplicity4(a, b, c, d) * babc * beta[d] * e;
                }
            }
        }
    }
    (c3, c4)
}

/// Distinct orderings of a sorted 4-tuple: 4! / Π(count!).
fn multiplicity4(a: usize, b: usize, c: usize, d: usize) -> f64 {
    let v = [a, b, c, d];
    let mut denom = 1;
    let mut run = 1;
    for k in 1..4 {
        if v[k] == v[k - 1] {
            run += 1;
            denom *= run;
        } else {
            run = 1;
        }
    }
    (24 / denom) as f64
}

fn sampled_central_moments(model: &PceModel, opts: &MomentOptions) -> Result<(f64, f64)> {
    let mean = model.mean();
    let n = opts.fallback_samples.max(1);
    let mut c3 = 0.0;
    let mut c4 = 0.0;
    // evaluate in chunks to bound memory
    let chunk = 100_000;
    let mut done = 0;
    let mut block = 0u64;
    while done < n {
        let k = chunk.min(n - done);
        let xi = sample_germ(&model.germ, k, opts.fallback_seed.wrapping_add(block))?;
        for y in eval_pce(model, &xi)? {
            let d = y - mean;
            let d2 = d * d;
            c3 += d2 * d;
            c4 += d2 * d2;
        }
        done += k;
        block += 1;
    }
    Ok((c3 / n as f64, c4 / n as f64))
}
