//! Fractional moments from integer moments through the Hölder bound,
//! compared with a large-sample estimate.

use fracpce::fracmoments::{fractional_moments_from_pce, fractional_moments_from_samples, DEFAULT_ORDERS};
use fracpce::models::{ForwardModel, ModelName, ModelSpec};
use fracpce::pce::fit_ols;
use fracpce::polybasis::total_degree_set;
use fracpce::sampling::sample_inputs;

fn main() -> fracpce::Result<()> {
    let spec = ModelSpec::default_for(ModelName::GaussianSum);
    let model = spec.build()?;
    let mut ed = sample_inputs(&spec.inputs, 30, 1)?;
    ed.evaluate(|x| model.evaluate(x))?;
    let pce = fit_ols(&ed, &total_degree_set(3, 1)?, &spec.inputs.natural_germ())?;
    let holder = fractional_moments_from_pce(&pce, &DEFAULT_ORDERS)?;

    let mut big = sample_inputs(&spec.inputs, 200_000, 2)?;
    big.evaluate(|x| model.evaluate(x))?;
    let mc = fractional_moments_from_samples(&big.y, &DEFAULT_ORDERS)?;

    println!("   r     holder          sampled        rel diff");
    for (i, r) in DEFAULT_ORDERS.iter().enumerate() {
        let (h, s) = (holder.values[i], mc.values[i]);
        println!("{r:4.1} {h:14.6e} {s:14.6e} {:+10.2e}", h / s - 1.0);
    }
    Ok(())
}
