use fracpce::config::from_json_str;
use fracpce::experiments::{run_convergence_study, ExperimentConfig, Method, Study};
use fracpce::fracmoments::{fractional_moments_from_pce, DEFAULT_ORDERS};
use fracpce::meigd::{fit_meigd, meigd_cdf, FitConfig};
use fracpce::metrics::ReferenceCdf;
use fracpce::models::{ForwardModel, ModelName, ModelSpec};
use fracpce::pce::{fit_ols, q_squared_loo};
use fracpce::polybasis::total_degree_set;
use fracpce::sampling::sample_inputs;

#[test]
fn plate_surrogate_is_accurate() {
    let spec = ModelSpec::default_for(ModelName::PlateFe);
    let model = spec.build().unwrap();
    let mut ed = sample_inputs(&spec.inputs, 60, 5).unwrap();
    ed.evaluate(|x| model.evaluate(x)).unwrap();
    let pce = fit_ols(&ed, &total_degree_set(3, 3).unwrap(), &spec.inputs.natural_germ()).unwrap();
    let q2 = q_squared_loo(&pce, &ed).unwrap();
    assert!(q2 > 0.99, "Q2 = {q2}");
}

#[test]
fn holder_targets_give_a_close_distribution_for_the_gaussian_sum() {
    let spec = ModelSpec::default_for(ModelName::GaussianSum);
    let model = spec.build().unwrap();
    let mut ed = sample_inputs(&spec.inputs, 20, 3).unwrap();
    ed.evaluate(|x| model.evaluate(x)).unwrap();
    let pce = fit_ols(&ed, &total_degree_set(3, 1).unwrap(), &spec.inputs.natural_germ()).unwrap();
    let targets = fractional_moments_from_pce(&pce, &DEFAULT_ORDERS).unwrap();
    let cfg = FitConfig { tolerance: 2e-3, stop_at_tolerance: true, ..FitConfig::default() };
    let fit = fit_meigd(&targets, &cfg).unwrap();
    assert!(fit.converged);
    let exact = ReferenceCdf::normal(50.0, 12f64.sqrt()).unwrap();
    for x in [44.0, 47.0, 50.0, 53.0, 56.0] {
        let d = (meigd_cdf(&fit.params, x).unwrap() - exact.cdf(x)).abs();
        assert!(d < 0.03, "x = {x}: |F - F_ref| = {d}");
    }
}

const STUDY: &str = r#"{
  "schema_version": 1,
  "model": { "name": "gaussian-sum", "inputs": [
    { "kind": "normal", "mean": 10.0, "std": 2.0 },
    { "kind": "normal", "mean": 10.0, "std": 2.0 },
    { "kind": "normal", "mean": 10.0, "std": 2.0 } ] },
  "basis": { "p": 1 },
  "n_sim": [20, 40],
  "n_stat": 4,
  "reference": { "kind": "normal", "mean": 50.0, "std": 3.4641016151377544 },
  "seed": 99,
  "record_timing": false
}"#;

#[test]
fn study_is_deterministic_and_complete() {
    let cfg: ExperimentConfig = from_json_str(STUDY).unwrap();
    cfg.validate().unwrap();
    let a = run_convergence_study(&cfg).unwrap();
    let b = run_convergence_study(&cfg).unwrap();
    assert_eq!(a.records.len(), 3 * 2 * 4);
    let eps = |r: &fracpce::experiments::ConvergenceResult| r.records.iter().map(|x| x.epsilon).collect::<Vec<_>>();
    assert_eq!(eps(&a), eps(&b));
    for m in Method::ALL {
        for n in [20, 40] {
            let agg = a.aggregate(m, n).unwrap();
            assert_eq!(agg.count, 4);
            assert!(agg.mean_epsilon.is_finite() && agg.mean_epsilon > 0.0);
        }
    }
}

#[test]
fn prepared_study_exposes_the_model() {
    let cfg: ExperimentConfig = from_json_str(STUDY).unwrap();
    let study = Study::prepare(cfg).unwrap();
    let ctx = study.context();
    assert_eq!(ctx.model.dim(), 3);
    assert!(ctx.model.evaluate(&[1.0, 2.0]).is_err());
}
