//! CDF-based divergence between a reference and an approximation.

use fracpce::meigd::{lognormal_cdf, MeigdParams};
use fracpce::metrics::{kl_pointwise, total_error, GridConfig, ReferenceCdf};

fn main() -> fracpce::Result<()> {
    println!("pointwise: {:.6}", kl_pointwise(0.3, 0.5));
    let reference = ReferenceCdf::normal(50.0, 12f64.sqrt())?;
    let grid = GridConfig::default();
    println!("self: {:e}", total_error(&reference, |x| reference.cdf(x), &grid)?);
    for shift in [0.1, 0.5, 2.0] {
        let other = ReferenceCdf::normal(50.0 + shift, 12f64.sqrt())?;
        println!("mean shift {shift:3.1}: {:.4e}", total_error(&reference, |x| other.cdf(x), &grid)?);
    }
    // a lognormal with the same first two moments
    let (m, v): (f64, f64) = (50.0, 12.0);
    let d = (1.0 + v / (m * m)).ln().sqrt();
    let c = m.ln() - 0.5 * d * d;
    let _ = MeigdParams::lognormal(c, d)?;
    println!("moment-matched lognormal: {:.4e}", total_error(&reference, |x| lognormal_cdf(c, d, x), &grid)?);
    Ok(())
}
