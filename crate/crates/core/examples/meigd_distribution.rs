//! Density, CDF, quantiles and fractional moments of the mixture law.

use fracpce::meigd::{meigd_cdf, meigd_fractional_moment, meigd_pdf, meigd_quantile, MeigdParams};

fn main() -> fracpce::Result<()> {
    let p = MeigdParams::new(0.4, 1.5, 2.0, 8.0, 0.3, 0.25, 1.0, 0.5)?;
    println!("{p:?}");
    for x in [0.5, 1.0, 1.5, 2.0, 3.0] {
        println!("x = {x:3.1}  pdf {:.6}  cdf {:.6}", meigd_pdf(&p, x)?, meigd_cdf(&p, x)?);
    }
    for q in [0.05, 0.5, 0.95] {
        println!("quantile({q}) = {:.6}", meigd_quantile(&p, q)?);
    }
    for r in [0.5, 1.0, 2.5] {
        println!("E[X^{r}] = {:.6}", meigd_fractional_moment(&p, r)?);
    }
    Ok(())
}
