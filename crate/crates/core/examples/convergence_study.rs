//! Small convergence study on the gaussian sum: ε per method and sample size.

use fracpce::experiments::{run_convergence_study, BasisConfig, ExperimentConfig, Method, ReferenceSpec};
use fracpce::models::{ModelName, ModelSpec};

fn main() -> fracpce::Result<()> {
    let mut cfg = ExperimentConfig::new(
        ModelSpec::default_for(ModelName::GaussianSum),
        BasisConfig { p: 1, q: 1.0 },
        vec![20, 50, 100],
        5,
        2024,
    );
    cfg.reference = ReferenceSpec::Normal { mean: 50.0, std: 12f64.sqrt() };
    let res = run_convergence_study(&cfg)?;
    println!("method      n_sim  mean eps    std eps     converged");
    for a in &res.aggregates {
        println!("{:<11} {:5}  {:.3e}  {:.3e}  {}/{}", a.method.as_str(), a.n_sim, a.mean_epsilon, a.std_epsilon, a.converged, a.count);
    }
    let best = res.aggregate(Method::PceHolder, 100).unwrap();
    println!("pce-holder at 100 runs: median {:.3e}", best.median_epsilon);
    Ok(())
}
