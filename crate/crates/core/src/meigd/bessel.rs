//! Modified Bessel function of the second kind for real order.
//!
//! `K_μ` and `K_{μ+1}` for `|μ| ≤ 1/2` come from Temme's series when `x < 2`
//! and from Steed's continued fraction otherwise; integer steps in order
//! follow by the (stable) forward recurrence
//! `K_{ν+1}(x) = (2ν/x) K_ν(x) + K_{ν-1}(x)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// Taylor coefficients of `1/Γ(z) = Σ_{k≥1} C[k-1] z^k`.
const RGAMMA: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// `(γ1, γ2, 1/Γ(1+μ), 1/Γ(1-μ))` with
/// `γ1 = (1/Γ(1-μ) - 1/Γ(1+μ)) / (2μ)` and `γ2 = (1/Γ(1-μ) + 1/Γ(1+μ)) / 2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    // 1/Γ(1+μ) = Σ C[k] μ^k; split into even and odd powers
    let m2 = mu * mu;
    let mut even = 0.0;
    let mut odd = 0.0;
    for k in (0..RGAMMA.len()).rev() {
        if k % 2 == 0 {
            even = even * m2 + RGAMMA[k];
        } else {
            odd = odd * m2 + RGAMMA[k];
        }
    }
    // 1/Γ(1+μ) = even + μ·odd, 1/Γ(1-μ) = even - μ·odd
    let gam1 = -odd;
    let gam2 = even;
    (gam1, gam2, even + mu * odd, even - mu * odd)
}

/// `1/Γ(1+μ)` for `|μ| ≤ 1/2`.
#[cfg(test)]
fn recip_gamma_1p(mu: f64) -> f64 {
    temme_gammas(mu).2
}

/// `(e^x K_μ(x), e^x K_{μ+1}(x))` for `|μ| ≤ 1/2`.
fn scaled_pair(mu: f64, x: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        let scale = x.exp();
        (sum * scale, sum1 * (2.0 / x) * scale)
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        h *= a1;
        let kmu = (PI / (2.0 * x)).sqrt() / s;
        let k1 = kmu * (mu + x + 0.5 - h) / x;
        (kmu, k1)
    }
}

/// `e^x K_ν(x)`, finite wherever `K_ν(x)` itself would underflow.
pub fn bessel_k_scaled(order: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("bessel_k needs x > 0, got {x}")));
    }
    if !order.is_finite() {
        return Err(Error::domain(format!("bessel_k order {order}")));
    }
    let nu = order.abs();
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let (mut k_mu, mut k_next) = scaled_pair(mu, x);
    let two_over_x = 2.0 / x;
    for i in 1..=(nl as usize) {
        let k_new = (mu + i as f64) * two_over_x * k_next + k_mu;
        k_mu = k_next;
        k_next = k_new;
    }
    if !k_mu.is_finite() {
        return Err(Error::Overflow(format!("K_{order}({x}) overflows")));
    }
    Ok(k_mu)
}

/// `K_ν(x)` for real order `ν` and `x > 0`; `K_{-ν} = K_ν`.
pub fn bessel_k(order: f64, x: f64) -> Result<f64> {
    let scaled = bessel_k_scaled(order, x)?;
    Ok(scaled * (-x).exp())
}

/// `ln K_ν(x)`.
pub fn ln_bessel_k(order: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(order, x)?.ln() - x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal_gamma_series() {
        let sqrt_pi = PI.sqrt();
        assert!((recip_gamma_1p(0.5) - 2.0 / sqrt_pi).abs() < 1e-15);
        assert!((recip_gamma_1p(-0.5) - 1.0 / sqrt_pi).abs() < 1e-15);
        assert_eq!(recip_gamma_1p(0.0), 1.0);
        // Γ(1.25) = 0.9064024770554771
        assert!((recip_gamma_1p(0.25) - 1.0 / 0.906_402_477_055_477_1).abs() < 1e-15);
    }

    #[test]
    fn half_order_closed_form() {
        let v = bessel_k(0.5, 1.0).unwrap();
        let expect = (PI / 2.0).sqrt() * (-1.0f64).exp();
        assert!((v / expect - 1.0).abs() < 1e-14);
        assert_eq!(bessel_k(-0.5, 1.0).unwrap(), v);
        assert!((v - 0.461_068_504_447_894_2).abs() < 1e-15);
    }

    #[test]
    fn known_values() {
        // K_0(1), K_1(1), K_0(0.1), K_1(10) from standard tables
        let cases = [
            (0.0, 1.0, 0.421_024_438_240_708_3),
            (1.0, 1.0, 0.601_907_230_197_234_6),
            (0.0, 0.1, 2.427_069_024_702_016_7),
            (1.0, 10.0, 1.864_877_345_382_558_5e-5),
            (2.0, 2.0, 0.253_759_754_566_055_9),
        ];
        for (nu, x, want) in cases {
            let got = bessel_k(nu, x).unwrap();
            assert!((got / want - 1.0).abs() < 1e-13, "K_{nu}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_k(1.0, 0.0).is_err());
        assert!(bessel_k(1.0, -1.0).is_err());
        assert!(bessel_k(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn scaled_survives_large_arguments() {
        let s = bessel_k_scaled(3.3, 5_000.0).unwrap();
        // e^x K_ν(x) ~ √(π/(2x)) for large x
        assert!((s / (PI / 10_000.0).sqrt() - 1.0).abs() < 2e-3);
        assert_eq!(bessel_k(3.3, 5_000.0).unwrap(), 0.0);
    }

    /// `K_ν(x) = ∫_0^∞ e^{-x cosh t} cosh(νt) dt`, integrated around the peak
    /// of the integrand in log space.
    fn integral_oracle(nu: f64, x: f64) -> f64 {
        let ln_g = |t: f64| -x * t.cosh() + (nu * t).abs() + (0.5 + 0.5 * (-2.0 * (nu * t).abs()).exp()).ln();
        let t_peak = (nu.abs() / x).asinh();
        let peak = ln_g(t_peak);
        let mut t_max = t_peak + 1.0;
        while ln_g(t_max) - peak > -50.0 {
            t_max += 1.0;
        }
        let mut f = |t: f64| (ln_g(t) - peak).exp();
        let breaks: Vec<f64> = (0..=64).map(|k| t_max * k as f64 / 64.0).collect();
        let q = crate::quadrature::integrate_panels(&mut f, &breaks, 0.0, 1e-13, 20_000);
        q.value * peak.exp()
    }

    #[test]
    fn matches_integral_representation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let nu: f64 = rng.random_range(-10.0..10.0);
            let x = 10f64.powf(rng.random_range(-2.0..2.0));
            let got = bessel_k(nu, x).unwrap();
            let want = integral_oracle(nu, x);
            assert!((got / want - 1.0).abs() < 1e-9, "K_{nu}({x}) = {got}, oracle {want}");
        }
        let want = integral_oracle(0.3, 2.0);
        assert!((bessel_k(0.3, 2.0).unwrap() / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_integer_closed_forms() {
        for k in 0..60 {
            let x = 1e-3 * 10f64.powf(5.0 * k as f64 / 59.0);
            let k12 = (PI / (2.0 * x)).sqrt() * (-x).exp();
            let k32 = k12 * (1.0 + 1.0 / x);
            let k52 = k12 * (1.0 + 3.0 / x + 3.0 / (x * x));
            for (nu, want) in [(0.5, k12), (1.5, k32), (2.5, k52)] {
                let got = bessel_k(nu, x).unwrap();
                assert!((got / want - 1.0).abs() < 1e-10, "K_{nu}({x})");
            }
        }
    }

    #[test]
    fn decreasing_in_x() {
        for nu in [0.0, 0.3, 2.7, 12.0] {
            let mut prev = f64::INFINITY;
            for k in 1..200 {
                let v = bessel_k(nu, 0.05 * k as f64).unwrap();
                assert!(v < prev);
                prev = v;
            }
        }
    }
}
