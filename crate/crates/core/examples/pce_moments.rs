//! Least-squares PCE, analytic moments and leave-one-out accuracy.

use fracpce::models::{ForwardModel, ModelName, ModelSpec};
use fracpce::pce::{fit_ols, moments_from_pce, q_squared_loo};
use fracpce::polybasis::total_degree_set;
use fracpce::sampling::sample_inputs;

fn main() -> fracpce::Result<()> {
    let spec = ModelSpec::default_for(ModelName::QuarterCar);
    let model = spec.build()?;
    let germ = spec.inputs.natural_germ();
    for p in 1..=4 {
        let basis = total_degree_set(3, p)?;
        let mut ed = sample_inputs(&spec.inputs, 60, 3)?;
        ed.evaluate(|x| model.evaluate(x))?;
        let pce = fit_ols(&ed, &basis, &germ)?;
        let m = moments_from_pce(&pce)?;
        println!(
            "p={p} P={:2}  mean {:.5} std {:.3e} skew {:+.3} kurt {:.3}  Q2 {:.6}",
            basis.len(),
            m.mean,
            m.variance.sqrt(),
            m.skewness,
            m.kurtosis,
            q_squared_loo(&pce, &ed)?
        );
    }
    Ok(())
}
