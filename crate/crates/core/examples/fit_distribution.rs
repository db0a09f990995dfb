//! Moment matching: recover a distribution from its own fractional moments.

use fracpce::fracmoments::{FractionalMomentSet, MomentSource, DEFAULT_ORDERS};
use fracpce::meigd::{fit_meigd, meigd_fractional_moment, FitConfig, MeigdParams};

fn main() -> fracpce::Result<()> {
    let truth = MeigdParams::new(0.3, 1.2, 1.5, 6.0, 0.2, 0.3, 0.8, -0.4)?;
    let values = DEFAULT_ORDERS.iter().map(|&r| meigd_fractional_moment(&truth, r)).collect::<Result<Vec<_>, _>>()?;
    let target = FractionalMomentSet::new(DEFAULT_ORDERS.to_vec(), values, MomentSource::SampleEstimate)?;
    let fit = fit_meigd(&target, &FitConfig::default())?;
    println!("converged {} residual {:.3e} after {} starts (best {})", fit.converged, fit.residual, fit.starts_used, fit.best_start);
    for (r, (t, f)) in DEFAULT_ORDERS.iter().zip(target.values.iter().zip(&fit.fitted)) {
        println!("r = {r:3.1}  target {t:.8}  fitted {f:.8}");
    }
    println!("{:?}", fit.params);
    Ok(())
}
