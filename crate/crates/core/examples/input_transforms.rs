//! Maps physical inputs to the standard germ and back.

use fracpce::distributions::{from_germ, to_germ, InputVariable, InputVector};

fn main() -> fracpce::Result<()> {
    let inputs = InputVector::new(vec![
        InputVariable::normal(10.0, 2.0)?,
        InputVariable::uniform(0.0, 4.0)?,
        InputVariable::truncated_normal_cov(2.1e11, 0.15)?,
    ])?;
    let germ = inputs.natural_germ();
    let x = [11.5, 1.0, 2.4e11];
    let xi = to_germ(&x, &inputs, &germ)?;
    let back = from_germ(&xi, &inputs, &germ)?;
    println!("germ families {:?}", germ.families());
    for i in 0..3 {
        println!("x = {:>12.5e}  xi = {:>9.5}  round trip = {:.5e}", x[i], xi[i], back[i]);
    }
    for v in inputs.variables() {
        let (lo, hi) = v.support();
        println!("{v:?}: mean {:.4e}, support [{lo:.3e}, {hi:.3e}], median {:.4e}", v.mean(), v.inverse_cdf(0.5)?);
    }
    Ok(())
}
