//! M-EIGD-LESND: a two-component mixture on `x > 0`.
//!
//! * EIGD: `X = Z^{1/η}` with `Z` inverse Gaussian (mean `a`, shape `b`);
//! * LESN: `ln X = c + d·U` with `U` extended skew-normal (slant `θ`, shift `τ`).
//!
//! Both components have closed-form fractional moments, which is what the
//! fitter in [`fit`] matches against.

pub mod bessel;
pub mod fit;

use serde::{Deserialize, Serialize};

pub use bessel::{bessel_k, bessel_k_scaled, ln_bessel_k};
pub use fit::{fit_meigd, FitConfig, FitResult, ParamBounds};

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::special::{norm_cdf, norm_ln_cdf, norm_ln_pdf, LN_SQRT_2PI};

/// The eight distribution parameters `{w, η, a, b, c, d, θ, τ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeigdParams {
    pub w: f64,
    pub eta: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub theta: f64,
    pub tau: f64,
}

impl MeigdParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(w: f64, eta: f64, a: f64, b: f64, c: f64, d: f64, theta: f64, tau: f64) -> Result<Self> {
        let p = Self { w, eta, a, b, c, d, theta, tau };
        p.validate()?;
        Ok(p)
    }

    /// Pure lognormal `LN(c, d)` (the LESN component with `θ = τ = 0`).
    pub fn lognormal(c: f64, d: f64) -> Result<Self> {
        Self::new(0.0, 1.0, 1.0, 1.0, c, d, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.w, self.eta, self.a, self.b, self.c, self.d, self.theta, self.tau];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite parameter in {self:?}")));
        }
        if !(0.0..=1.0).contains(&self.w) {
            return Err(Error::domain(format!("w = {} outside [0, 1]", self.w)));
        }
        for (name, v) in [("eta", self.eta), ("a", self.a), ("b", self.b), ("d", self.d)] {
            if v <= 0.0 {
                return Err(Error::domain(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    fn delta(&self) -> f64 {
        self.theta / (1.0 + self.theta * self.theta).sqrt()
    }

    /// Mean and standard deviation of the extended skew-normal variable `U`.
    fn esn_location(&self) -> (f64, f64) {
        let lambda = (norm_ln_pdf(self.tau) - norm_ln_cdf(self.tau)).exp();
        let delta = self.delta();
        let mean = delta * lambda;
        let var = 1.0 - delta * delta * lambda * (lambda + self.tau);
        (mean, var.max(1e-12).sqrt())
    }
}

/// Density of the EIGD component.
fn eigd_pdf(p: &MeigdParams, x: f64) -> f64 {
    let lx = x.ln();
    let z = (p.eta * lx).exp();
    if z == 0.0 || !z.is_finite() {
        return 0.0;
    }
    let ln = p.eta.ln() + 0.5 * p.b.ln() - LN_SQRT_2PI - (0.5 * p.eta + 1.0) * lx
        - p.b * (z - p.a).powi(2) / (2.0 * z * p.a * p.a);
    ln.exp()
}

/// `ln` of the extended skew-normal density.
fn esn_ln_pdf(p: &MeigdParams, u: f64) -> f64 {
    let alpha0 = p.tau * (1.0 + p.theta * p.theta).sqrt();
    norm_ln_pdf(u) + norm_ln_cdf(alpha0 + p.theta * u) - norm_ln_cdf(p.tau)
}

fn lesn_pdf(p: &MeigdParams, x: f64) -> f64 {
    let u = (x.ln() - p.c) / p.d;
    (esn_ln_pdf(p, u) - (p.d * x).ln()).exp()
}

fn pdf_unchecked(p: &MeigdParams, x: f64) -> f64 {
    if !(x > 0.0) || x == f64::INFINITY {
        return 0.0;
    }
    let mut v = 0.0;
    if p.w > 0.0 {
        v += p.w * eigd_pdf(p, x);
    }
    if p.w < 1.0 {
        v += (1.0 - p.w) * lesn_pdf(p, x);
    }
    v
}

/// Probability density at `x`; zero for `x <= 0`.
pub fn meigd_pdf(p: &MeigdParams, x: f64) -> Result<f64> {
    p.validate()?;
    Ok(pdf_unchecked(p, x))
}

/// Inverse-Gaussian CDF of `Z = X^η` at `z`.
fn eigd_cdf(p: &MeigdParams, x: f64) -> f64 {
    let z = (p.eta * x.ln()).exp();
    if z == 0.0 {
        return 0.0;
    }
    if !z.is_finite() {
        return 1.0;
    }
    let s = (p.b / z).sqrt();
    let first = norm_cdf(s * (z / p.a - 1.0));
    let second = (2.0 * p.b / p.a + norm_ln_cdf(-s * (z / p.a + 1.0))).exp();
    (first + second).clamp(0.0, 1.0)
}

/// CDF of the LESN component at sorted log-coordinates, by cumulative
/// adaptive quadrature of the skew-normal density.
fn lesn_cdf_sorted(p: &MeigdParams, lx: &[f64]) -> Vec<f64> {
    let (mu, sd) = p.esn_location();
    let lo = mu - 40.0 * sd;
    let hi = mu + 40.0 * sd;
    // panels no wider than the narrower of the spread and the slant transition
    let width = (0.25 * sd).min(0.25 / p.theta.abs().max(1e-3));
    let density = |u: f64| esn_ln_pdf(p, u).exp();
    let mut out = Vec::with_capacity(lx.len());
    let mut at = lo;
    let mut acc = 0.0;
    for &l in lx {
        let u = (l - p.c) / p.d;
        if u <= lo {
            out.push(0.0);
            continue;
        }
        let target = u.min(hi);
        while at < target {
            let next = (at + width).min(target);
            acc += integrate(density, at, next, 1e-16, 1e-12).value;
            at = next;
        }
        out.push(if u >= hi { 1.0 } else { acc.min(1.0) });
    }
    out
}

/// CDF at each point of `xs`, which must be sorted ascending.
pub fn meigd_cdf_many(p: &MeigdParams, xs: &[f64]) -> Result<Vec<f64>> {
    p.validate()?;
    if xs.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::domain("cdf evaluation points must be sorted"));
    }
    let first_pos = xs.partition_point(|&x| x <= 0.0);
    let positive = &xs[first_pos..];
    let lesn = if p.w < 1.0 {
        let lx: Vec<f64> = positive.iter().map(|x| x.ln()).collect();
        lesn_cdf_sorted(p, &lx)
    } else {
        vec![0.0; positive.len()]
    };
    let mut out = vec![0.0; first_pos];
    for (x, f_lesn) in positive.iter().zip(lesn) {
        let f_eigd = if p.w > 0.0 { eigd_cdf(p, *x) } else { 0.0 };
        out.push((p.w * f_eigd + (1.0 - p.w) * f_lesn).clamp(0.0, 1.0));
    }
    Ok(out)
}

pub fn meigd_cdf(p: &MeigdParams, x: f64) -> Result<f64> {
    Ok(meigd_cdf_many(p, &[x])?[0])
}

/// Quantile by bisection on `ln x`.
pub fn meigd_quantile(p: &MeigdParams, prob: f64) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::domain(format!("probability {prob} outside (0, 1)")));
    }
    let (mut lo, mut hi) = (-50.0f64, 50.0f64);
    if meigd_cdf(p, lo.exp())? > prob || meigd_cdf(p, hi.exp())? < prob {
        return Err(Error::domain("quantile outside [e^-50, e^50]"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if meigd_cdf(p, mid.exp())? < prob {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// `ln E[X^r]` of the EIGD component.
fn eigd_ln_moment(p: &MeigdParams, r: f64) -> Result<f64> {
    let x = p.b / p.a;
    let order = r / p.eta - 0.5;
    let scaled = bessel_k_scaled(order, x)?;
    Ok(0.5 * (2.0 * p.b / std::f64::consts::PI).ln() + order * p.a.ln() + scaled.ln())
}

/// `ln E[X^r]` of the LESN component.
fn lesn_ln_moment(p: &MeigdParams, r: f64) -> f64 {
    p.c * r + 0.5 * p.d * p.d * r * r + norm_ln_cdf(p.tau + p.delta() * p.d * r)
        - norm_ln_cdf(p.tau)
}

/// `E[X^r]`, in closed form.
pub fn meigd_fractional_moment(p: &MeigdParams, r: f64) -> Result<f64> {
    p.validate()?;
    fractional_moment_unchecked(p, r)
}

pub(crate) fn fractional_moment_unchecked(p: &MeigdParams, r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("moment order {r} must be >= 0")));
    }
    const LN_MAX: f64 = 700.0;
    let mut total = 0.0;
    if p.w > 0.0 {
        let ln = eigd_ln_moment(p, r)?;
        if ln > LN_MAX {
            return Err(Error::Overflow(format!("EIGD moment of order {r}: ln M = {ln:.1}")));
        }
        total += p.w * ln.exp();
    }
    if p.w < 1.0 {
        let ln = lesn_ln_moment(p, r);
        if ln > LN_MAX {
            return Err(Error::Overflow(format!(
                "LESN moment of order {r} with d = {}: ln M = {ln:.1}",
                p.d
            )));
        }
        total += (1.0 - p.w) * ln.exp();
    }
    if !total.is_finite() {
        return Err(Error::NonFinite(format!("moment of order {r}")));
    }
    Ok(total)
}

/// Lognormal CDF, the `w = 0, θ = τ = 0` collapse.
pub fn lognormal_cdf(c: f64, d: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        norm_cdf((x.ln() - c) / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_panels;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// `∫_0^∞ x^r pdf(x) dx` in the variable `s = ln x`.
    fn quad_moment(p: &MeigdParams, r: f64) -> f64 {
        let mut f = |s: f64| {
            let x = s.exp();
            let v = x.powf(r) * x * pdf_unchecked(p, x);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        let breaks: Vec<f64> = (0..=2000).map(|k| -40.0 + 0.04 * k as f64).collect();
        integrate_panels(&mut f, &breaks, 0.0, 1e-11, 40_000).value
    }

    fn sample_params(u: [f64; 8]) -> MeigdParams {
        let lerp = |t: f64, lo: f64, hi: f64| lo + t * (hi - lo);
        MeigdParams::new(
            u[0],
            lerp(u[1], 0.5, 5.0),
            10f64.powf(lerp(u[2], -1.0, 1.0)),
            10f64.powf(lerp(u[3], -1.0, 1.0)),
            lerp(u[4], -1.0, 1.0),
            lerp(u[5], 0.1, 0.8),
            lerp(u[6], -3.0, 3.0),
            lerp(u[7], -3.0, 3.0),
        )
        .unwrap()
    }

    fn some_params() -> MeigdParams {
        MeigdParams::new(0.4, 1.7, 2.0, 3.0, 0.3, 0.4, 1.5, -0.7).unwrap()
    }

    #[test]
    fn validation() {
        assert!(MeigdParams::new(1.1, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(MeigdParams::new(0.5, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(MeigdParams::new(0.5, 1.0, 1.0, 1.0, 0.0, -1.0, 0.0, 0.0).is_err());
        assert!(MeigdParams::new(0.5, 1.0, 1.0, f64::NAN, 0.0, 1.0, 0.0, 0.0).is_err());
        let bad = MeigdParams { a: -1.0, ..some_params() };
        assert!(meigd_pdf(&bad, 1.0).is_err());
    }

    #[test]
    fn lognormal_collapse() {
        let p = MeigdParams::lognormal(0.7, 0.3).unwrap();
        let x = 0.7f64.exp();
        let want = 1.0 / (0.3 * x * (2.0 * PI).sqrt());
        assert!((meigd_pdf(&p, x).unwrap() / want - 1.0).abs() < 1e-14);
        for x in [0.5, 1.0, 2.0, 3.0, 5.0] {
            let f = meigd_cdf(&p, x).unwrap();
            assert!((f - lognormal_cdf(0.7, 0.3, x)).abs() < 1e-8, "x = {x}");
        }
        let m2 = meigd_fractional_moment(&p, 2.0).unwrap();
        assert!((m2 / (2.0 * 0.7 + 2.0 * 0.09f64).exp() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn support_is_positive() {
        let p = some_params();
        assert_eq!(meigd_pdf(&p, -1.0).unwrap(), 0.0);
        assert_eq!(meigd_pdf(&p, 0.0).unwrap(), 0.0);
        assert_eq!(meigd_cdf(&p, -1.0).unwrap(), 0.0);
        assert_eq!(meigd_cdf(&p, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn eigd_component_normalized() {
        let p = MeigdParams::new(1.0, 1.0, 2.0, 3.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert!((quad_moment(&p, 0.0) - 1.0).abs() < 1e-6);
        // closed-form inverse-Gaussian mean and variance
        assert!((meigd_fractional_moment(&p, 1.0).unwrap() - 2.0).abs() < 1e-12);
        let m2 = meigd_fractional_moment(&p, 2.0).unwrap();
        assert!((m2 - (4.0 + 8.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_order_moment_is_one() {
        let p = some_params();
        assert!((meigd_fractional_moment(&p, 0.0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cdf_is_monotone_and_reaches_one() {
        let p = some_params();
        let xs: Vec<f64> = (1..=4000).map(|k| k as f64 * 0.005).collect();
        let f = meigd_cdf_many(&p, &xs).unwrap();
        assert!(f.windows(2).all(|w| w[0] <= w[1]));
        assert!(f.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!((meigd_cdf(&p, 1e6).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn cdf_matches_pdf_integral() {
        let p = some_params();
        for x in [0.3f64, 1.0, 1.8, 4.0] {
            let mut f = |s: f64| {
                let t = s.exp();
                t * pdf_unchecked(&p, t)
            };
            let breaks: Vec<f64> = (0..=400).map(|k| -40.0 + (40.0 + x.ln()) * k as f64 / 400.0).collect();
            let want = integrate_panels(&mut f, &breaks, 1e-15, 1e-12, 20_000).value;
            assert!((meigd_cdf(&p, x).unwrap() - want).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn median_by_bisection() {
        let p = some_params();
        let m = meigd_quantile(&p, 0.5).unwrap();
        assert!((meigd_cdf(&p, m).unwrap() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn moment_overflow_is_reported() {
        let p = MeigdParams::lognormal(0.0, 20.0).unwrap();
        assert!(matches!(meigd_fractional_moment(&p, 4.0), Err(Error::Overflow(_))));
        assert!(meigd_fractional_moment(&p, -1.0).is_err());
    }

    #[test]
    fn fixed_draws_match_quadrature() {
        let p = some_params();
        for r in [0.5, 1.0, 1.7, 2.3, 3.0, 4.0] {
            let analytic = meigd_fractional_moment(&p, r).unwrap();
            let numeric = quad_moment(&p, r);
            assert!((analytic / numeric - 1.0).abs() < 1e-6, "r = {r}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn analytic_moments_match_quadrature(u in proptest::array::uniform8(0.0f64..1.0)) {
            let p = sample_params(u);
            prop_assert!((quad_moment(&p, 0.0) - 1.0).abs() < 1e-6);
            for r in [0.5, 1.0, 1.7, 2.3, 3.0, 4.0] {
                let analytic = meigd_fractional_moment(&p, r).unwrap();
                let numeric = quad_moment(&p, r);
                prop_assert!((analytic / numeric - 1.0).abs() < 1e-6, "r = {} {:?}", r, p);
            }
        }

        #[test]
        fn pdf_nonnegative(u in proptest::array::uniform8(0.0f64..1.0), x in 0.0f64..20.0) {
            prop_assert!(pdf_unchecked(&sample_params(u), x) >= 0.0);
        }
    }
}
