//! Latin hypercube design and model evaluation.

use fracpce::models::{ForwardModel, ModelName, ModelSpec};
use fracpce::sampling::{lhs, sample_inputs};

fn main() -> fracpce::Result<()> {
    // each column of a unit-cube design hits every one of the n strata once
    let u = lhs(8, 2, 42)?;
    for i in 0..u.nrows() {
        println!("{:.3} {:.3}", u[(i, 0)], u[(i, 1)]);
    }

    let spec = ModelSpec::default_for(ModelName::GaussianSum);
    let model = spec.build()?;
    let mut ed = sample_inputs(&spec.inputs, 50, 7)?;
    ed.evaluate(|x| model.evaluate(x))?;
    let mean = ed.y.iter().sum::<f64>() / ed.len() as f64;
    println!("{} runs of the gaussian sum, sample mean {mean:.4}", ed.len());
    Ok(())
}
