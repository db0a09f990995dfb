//! Fractional-moment matching by multistart Levenberg–Marquardt with
//! geodesic acceleration.
//!
//! The search runs in unconstrained coordinates mapped onto a parameter box
//! (see [`ParamBounds`]); the residual vector holds the relative mismatches
//! `(M(r_k) - t_k) / t_k`.

use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fractional_moment_unchecked, MeigdParams};
use crate::error::{Error, Result};
use crate::fracmoments::FractionalMomentSet;

type Vec8 = SVector<f64, 8>;
type Mat8 = SMatrix<f64, 8, 8>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub starts: usize,
    /// Convergence threshold on the root-sum-square relative mismatch.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Starts evaluated together after the informed start; the search stops
    /// after the first batch that contains a converged start.
    pub batch: usize,
    pub seed: u64,
    pub bounds: ParamBounds,
    /// Stop each local search as soon as it reaches `tolerance` instead of
    /// polishing further. Useful when the targets are themselves uncertain.
    pub stop_at_tolerance: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            starts: 50,
            tolerance: 1e-6,
            max_iterations: 300,
            batch: 8,
            seed: 0x5eed,
            bounds: ParamBounds::default(),
            stop_at_tolerance: false,
        }
    }
}

/// Search box. `a` is bounded relative to `m^η`, where `m` is the target
/// norm at the lowest order, and `b` through the ratio `b / a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamBounds {
    pub eta: (f64, f64),
    /// Largest `|ln(a / m^η)|`.
    pub ln_a_span: f64,
    pub shape_ratio: (f64, f64),
    pub d: (f64, f64),
    pub theta: f64,
    pub tau: f64,
}

impl Default for ParamBounds {
    fn default() -> Self {
        Self {
            eta: (0.1, 20.0),
            ln_a_span: 4.0 * std::f64::consts::LN_10,
            shape_ratio: (1e-4, 1e6),
            d: (1e-3, 5.0),
            theta: 10.0,
            tau: 10.0,
        }
    }
}

impl ParamBounds {
    pub fn validate(&self) -> Result<()> {
        let ok = self.eta.0 > 0.0
            && self.eta.0 < self.eta.1
            && self.ln_a_span > 0.0
            && self.shape_ratio.0 > 0.0
            && self.shape_ratio.0 < self.shape_ratio.1
            && self.d.0 > 0.0
            && self.d.0 < self.d.1
            && self.theta > 0.0
            && self.tau > 0.0;
        if ok && [self.eta.1, self.ln_a_span, self.shape_ratio.1, self.d.1, self.theta, self.tau]
            .iter()
            .all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::domain(format!("invalid parameter bounds {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: MeigdParams,
    pub residual: f64,
    pub starts_used: usize,
    /// Index of the start that produced `params`.
    pub best_start: usize,
    pub converged: bool,
    pub seed: u64,
    /// Moments of the fitted distribution at the target orders.
    pub fitted: Vec<f64>,
}

struct Problem<'a> {
    orders: &'a [f64],
    targets: &'a [f64],
    bounds: ParamBounds,
    ln_scale: f64,
}

fn logistic(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-9, 1.0 - 1e-9);
    (p / (1.0 - p)).ln()
}

fn to_box(v: f64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * logistic(v)
}

fn from_box(x: f64, lo: f64, hi: f64) -> f64 {
    logit((x - lo) / (hi - lo))
}

impl Problem<'_> {
    fn decode(&self, u: &Vec8) -> MeigdParams {
        let bx = &self.bounds;
        let eta = to_box(u[1], bx.eta.0, bx.eta.1);
        let ln_a = eta * self.ln_scale + to_box(u[2], -bx.ln_a_span, bx.ln_a_span);
        let ln_ratio = to_box(u[3], bx.shape_ratio.0.ln(), bx.shape_ratio.1.ln());
        MeigdParams {
            w: logistic(u[0]),
            eta,
            a: ln_a.exp(),
            b: (ln_a + ln_ratio).exp(),
            c: u[4],
            d: to_box(u[5], bx.d.0.ln(), bx.d.1.ln()).exp(),
            theta: to_box(u[6], -bx.theta, bx.theta),
            tau: to_box(u[7], -bx.tau, bx.tau),
        }
    }

    fn encode(&self, p: &MeigdParams) -> Vec8 {
        let bx = &self.bounds;
        Vec8::from([
            logit(p.w),
            from_box(p.eta, bx.eta.0, bx.eta.1),
            from_box(p.a.ln() - p.eta * self.ln_scale, -bx.ln_a_span, bx.ln_a_span),
            from_box((p.b / p.a).ln(), bx.shape_ratio.0.ln(), bx.shape_ratio.1.ln()),
            p.c,
            from_box(p.d.ln(), bx.d.0.ln(), bx.d.1.ln()),
            from_box(p.theta, -bx.theta, bx.theta),
            from_box(p.tau, -bx.tau, bx.tau),
        ])
    }

    /// Relative mismatches, or `None` when any moment is not representable.
    fn residuals(&self, u: &Vec8) -> Option<Vec<f64>> {
        if u.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let p = self.decode(u);
        if p.validate().is_err() {
            return None;
        }
        let mut out = Vec::with_capacity(self.orders.len());
        for (&r, &t) in self.orders.iter().zip(self.targets) {
            let m = fractional_moment_unchecked(&p, r).ok()?;
            out.push((m - t) / t);
        }
        Some(out)
    }
}

fn norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

struct Local {
    u: Vec8,
    residual: f64,
}

/// Levenberg–Marquardt from one start; `None` when the start itself is not
/// evaluable.
fn levenberg_marquardt(prob: &Problem, start: Vec8, cfg: &FitConfig) -> Option<Local> {
    let n = prob.orders.len();
    let mut u = start;
    let mut r = prob.residuals(&u)?;
    let mut cost = norm(&r);
    let mut lambda = 1e-3;
    let mut stalled = 0;
    let mut jac = vec![Vec8::zeros(); n];

    // by default iterate past a loose acceptance tolerance and stop once far
    // inside a tight one
    let stop = if cfg.stop_at_tolerance { cfg.tolerance } else { (0.1 * cfg.tolerance).min(1e-7) };
    for _ in 0..cfg.max_iterations {
        if cost <= stop {
            break;
        }
        // central-difference Jacobian, one-sided where a probe is not evaluable
        for j in 0..8 {
            let h = 1e-5 * u[j].abs().max(1.0);
            let mut up = u;
            up[j] += h;
            let rp = prob.residuals(&up);
            up[j] = u[j] - h;
            let rm = prob.residuals(&up);
            match (rp, rm) {
                (Some(rp), Some(rm)) => {
                    for k in 0..n {
                        jac[k][j] = (rp[k] - rm[k]) / (2.0 * h);
                    }
                }
                (Some(rp), None) => {
                    for k in 0..n {
                        jac[k][j] = (rp[k] - r[k]) / h;
                    }
                }
                (None, Some(rm)) => {
                    for k in 0..n {
                        jac[k][j] = (r[k] - rm[k]) / h;
                    }
                }
                (None, None) => return None,
            }
        }
        let mut jtj = Mat8::zeros();
        let mut jtr = Vec8::zeros();
        for k in 0..n {
            jtj += jac[k] * jac[k].transpose();
            jtr += jac[k] * r[k];
        }

        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj;
            for j in 0..8 {
                a[(j, j)] += lambda * (jtj[(j, j)] + 1e-12);
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let v = chol.solve(&(-jtr));
            // second-order correction along v from a directional second difference
            let hv = 0.1;
            let mut jv = vec![0.0; n];
            for k in 0..n {
                jv[k] = jac[k].dot(&v);
            }
            let mut step = v;
            if let Some(rh) = prob.residuals(&(u + v * hv)) {
                let mut jt_rvv = Vec8::zeros();
                for k in 0..n {
                    let rvv = 2.0 / hv * ((rh[k] - r[k]) / hv - jv[k]);
                    jt_rvv += jac[k] * rvv;
                }
                let accel = chol.solve(&(-jt_rvv));
                if accel.norm() <= 1.5 * v.norm() {
                    step += accel * 0.5;
                }
            }
            let trial = u + step;
            match prob.residuals(&trial) {
                Some(rt) if norm(&rt) < cost => {
                    let new_cost = norm(&rt);
                    let gain = (cost - new_cost) / cost;
                    u = trial;
                    r = rt;
                    cost = new_cost;
                    lambda = (lambda / 3.0).max(1e-12);
                    improved = true;
                    stalled = if gain < 1e-9 { stalled + 1 } else { 0 };
                    break;
                }
                _ => lambda *= 4.0,
            }
        }
        if !improved || stalled >= 5 {
            break;
        }
    }
    cost.is_finite().then_some(Local { u, residual: cost })
}

/// Start 0 is a lognormal-like guess from the target profile; the rest are
/// drawn from the configured seed.
fn start_point(prob: &Problem, index: usize, seed: u64) -> Vec8 {
    let m1 = prob.ln_scale.exp();
    if index == 0 {
        let (c, d2) = lognormal_profile(prob.orders, prob.targets);
        let d = d2.max(1e-6).sqrt().clamp(1e-3, 3.0);
        let mean = (c + 0.5 * d * d).exp();
        let var = mean * mean * ((d * d).exp() - 1.0);
        let p = MeigdParams {
            w: 0.5,
            eta: 1.0,
            a: mean,
            b: mean.powi(3) / var,
            c,
            d,
            theta: 0.0,
            tau: 0.0,
        };
        return prob.encode(&p);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let eta: f64 = rng.random_range(0.5..5.0);
    // Z = X^η has mean near m1^η
    let scale = m1.powf(eta);
    let p = MeigdParams {
        w: rng.random_range(0.05..0.95),
        eta,
        a: scale * 10f64.powf(rng.random_range(-2.0..2.0)),
        b: scale * 10f64.powf(rng.random_range(-2.0..2.0)),
        c: m1.ln(),
        d: rng.random_range(0.05..1.0),
        theta: rng.random_range(-3.0..3.0),
        tau: rng.random_range(-3.0..3.0),
    };
    prob.encode(&p)
}

/// Least-squares fit of `ln t = c r + d² r² / 2`.
fn lognormal_profile(orders: &[f64], targets: &[f64]) -> (f64, f64) {
    let (mut s22, mut s23, mut s33, mut b2, mut b3) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&r, &t) in orders.iter().zip(targets) {
        let (x2, x3, y) = (r, 0.5 * r * r, t.ln());
        s22 += x2 * x2;
        s23 += x2 * x3;
        s33 += x3 * x3;
        b2 += x2 * y;
        b3 += x3 * y;
    }
    let det = s22 * s33 - s23 * s23;
    if det.abs() < 1e-300 || orders.len() < 2 {
        let r = orders.first().copied().unwrap_or(1.0);
        return (targets.first().map_or(0.0, |t| t.ln() / r), 0.01);
    }
    ((b2 * s33 - b3 * s23) / det, (s22 * b3 - s23 * b2) / det)
}

/// Fits the eight parameters to the target fractional moments.
///
/// The best start is returned whether or not it reached the tolerance;
/// an error is raised only when no start could be evaluated at all.
pub fn fit_meigd(target: &FractionalMomentSet, cfg: &FitConfig) -> Result<FitResult> {
    if target.is_empty() {
        return Err(Error::domain("no target moments"));
    }
    if let Some(t) = target.values.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(Error::domain(format!("target moment {t} must be positive and finite")));
    }
    if cfg.starts == 0 || cfg.batch == 0 {
        return Err(Error::domain("need at least one start"));
    }
    cfg.bounds.validate()?;
    let (r_min, t_min) = target
        .orders
        .iter()
        .zip(&target.values)
        .min_by(|a, b| a.0.total_cmp(b.0))
        .map(|(r, t)| (*r, *t))
        .unwrap_or((1.0, 1.0));
    let prob = Problem {
        orders: &target.orders,
        targets: &target.values,
        bounds: cfg.bounds,
        ln_scale: if r_min > 0.0 { t_min.ln() / r_min } else { 0.0 },
    };

    let mut best: Option<(usize, Local)> = None;
    let mut used = 0;
    while used < cfg.starts {
        // the informed start runs alone
        let end = if used == 0 { 1 } else { (used + cfg.batch).min(cfg.starts) };
        let batch: Vec<(usize, Option<Local>)> = (used..end)
            .into_par_iter()
            .map(|i| (i, levenberg_marquardt(&prob, start_point(&prob, i, cfg.seed), cfg)))
            .collect();
        for (i, local) in batch {
            let Some(local) = local else { continue };
            let better = match &best {
                None => true,
                Some((j, b)) => local.residual < b.residual || (local.residual == b.residual && i < *j),
            };
            if better {
                best = Some((i, local));
            }
        }
        used = end;
        if best.as_ref().is_some_and(|(_, b)| b.residual <= cfg.tolerance) {
            break;
        }
    }

    let Some((best_start, local)) = best else {
        return Err(Error::FitDiverged { starts: used, best: f64::INFINITY });
    };
    let params = prob.decode(&local.u);
    let fitted = target
        .orders
        .iter()
        .map(|&r| fractional_moment_unchecked(&params, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(FitResult {
        params,
        residual: local.residual,
        starts_used: used,
        best_start,
        converged: local.residual <= cfg.tolerance,
        seed: cfg.seed,
        fitted,
    })
}
