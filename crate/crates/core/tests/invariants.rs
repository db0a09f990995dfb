use fracpce::distributions::{from_germ, to_germ, InputVariable, InputVector};
use fracpce::fracmoments::{fractional_moments_from_samples, holder_from_absolute, DEFAULT_ORDERS};
use fracpce::meigd::{meigd_cdf_many, MeigdParams};
use fracpce::pce::{eval_pce, fit_ols, moments_from_pce};
use fracpce::polybasis::{hyperbolic_set, total_degree_cardinality, total_degree_set, GermFamily, GermSpec};
use fracpce::sampling::{lhs, sample_inputs, ExperimentalDesign};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn params(u: [f64; 8]) -> MeigdParams {
    MeigdParams::new(
        u[0],
        0.5 + 4.5 * u[1],
        10f64.powf(2.0 * u[2] - 1.0),
        10f64.powf(2.0 * u[3] - 1.0),
        2.0 * u[4] - 1.0,
        0.1 + 0.7 * u[5],
        6.0 * u[6] - 3.0,
        6.0 * u[7] - 3.0,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lhs_has_one_point_per_stratum(n in 1usize..60, m in 1usize..5, seed in any::<u64>()) {
        let u = lhs(n, m, seed).unwrap();
        for j in 0..m {
            let mut hits = vec![0; n];
            for i in 0..n {
                let v = u[(i, j)];
                prop_assert!(v > 0.0 && v < 1.0);
                hits[((v * n as f64) as usize).min(n - 1)] += 1;
            }
            prop_assert!(hits.iter().all(|&h| h == 1));
        }
    }

    #[test]
    fn germ_transform_round_trips(u in proptest::array::uniform3(0.001f64..0.999)) {
        let inputs = InputVector::new(vec![
            InputVariable::normal(3.0, 0.5).unwrap(),
            InputVariable::uniform(-2.0, 5.0).unwrap(),
            InputVariable::truncated_normal_cov(4.8e4, 0.1).unwrap(),
        ]).unwrap();
        let germ = inputs.natural_germ();
        let x: Vec<f64> = inputs.variables().iter().zip(u).map(|(v, p)| v.inverse_cdf(p).unwrap()).collect();
        let back = from_germ(&to_germ(&x, &inputs, &germ).unwrap(), &inputs, &germ).unwrap();
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{} vs {}", a, b);
        }
    }

    #[test]
    fn meigd_cdf_is_monotone_in_unit_interval(u in proptest::array::uniform8(0.0f64..1.0)) {
        let p = params(u);
        let xs: Vec<f64> = (1..200).map(|k| 0.05 * k as f64).collect();
        let f = meigd_cdf_many(&p, &xs).unwrap();
        prop_assert!(f.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!(f.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn holder_is_exact_at_integer_orders(m1 in 0.5f64..3.0, spread in 1.01f64..2.0) {
        let abs = [m1, m1.powi(2) * spread, m1.powi(3) * spread.powi(3), m1.powi(4) * spread.powi(6)];
        for (k, &a) in abs.iter().enumerate() {
            let r = (k + 1) as f64;
            prop_assert!((holder_from_absolute(&abs, r).unwrap() / a - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_moment_norms_are_lyapunov_monotone(ys in proptest::collection::vec(0.01f64..100.0, 5..80)) {
        let m = fractional_moments_from_samples(&ys, &DEFAULT_ORDERS).unwrap();
        prop_assert!(m.is_lyapunov_monotone(1e-12));
    }

    #[test]
    fn cardinality_matches_binomial(m in 1usize..7, p in 0usize..7, q in 0.3f64..1.0) {
        let full = total_degree_set(m, p).unwrap();
        prop_assert_eq!(Some(full.len()), total_degree_cardinality(m, p));
        let hyp = hyperbolic_set(m, p, q).unwrap();
        prop_assert!(hyp.len() <= full.len());
        prop_assert!(hyp.indices().iter().all(|a| a.q_norm(q) <= p as f64 + 1e-9));
    }

    #[test]
    fn ols_reproduces_polynomials_in_the_basis(c in proptest::array::uniform4(-3.0f64..3.0), seed in any::<u64>()) {
        let germ = GermSpec::uniform(GermFamily::Hermite, 2).unwrap();
        let basis = total_degree_set(2, 2).unwrap();
        let f = |a: f64, b: f64| c[0] + c[1] * a + c[2] * a * b + c[3] * (b * b - 1.0);
        let u = lhs(30, 2, seed).unwrap();
        let xi = u.map(fracpce::special::norm_inv_cdf);
        let y: Vec<f64> = (0..30).map(|i| f(xi[(i, 0)], xi[(i, 1)])).collect();
        let ed = ExperimentalDesign::from_parts(xi.clone(), xi.clone(), y, seed).unwrap();
        let pce = fit_ols(&ed, &basis, &germ).unwrap();
        let probe = DMatrix::from_row_slice(2, 2, &[0.3, -1.2, 2.0, 0.5]);
        let pred = eval_pce(&pce, &probe).unwrap();
        prop_assert!((pred[0] - f(0.3, -1.2)).abs() < 1e-8);
        prop_assert!((pred[1] - f(2.0, 0.5)).abs() < 1e-8);
        let m = moments_from_pce(&pce).unwrap();
        prop_assert!((m.mean - c[0]).abs() < 1e-8);
        prop_assert!((m.variance - (c[1] * c[1] + c[2] * c[2] + 2.0 * c[3] * c[3])).abs() < 1e-7);
    }
}

#[test]
fn gaussian_sum_is_recovered_from_normal_inputs() {
    let inputs = InputVector::new(vec![InputVariable::normal(10.0, 2.0).unwrap(); 3]).unwrap();
    let mut ed = sample_inputs(&inputs, 12, 9).unwrap();
    ed.evaluate(|x| Ok(20.0 + x.iter().sum::<f64>())).unwrap();
    let pce = fit_ols(&ed, &total_degree_set(3, 1).unwrap(), &inputs.natural_germ()).unwrap();
    for (k, b) in pce.beta.iter().enumerate() {
        let want = if k == 0 { 50.0 } else { 2.0 };
        assert!((b - want).abs() < 1e-10, "beta[{k}] = {b}");
    }
}
