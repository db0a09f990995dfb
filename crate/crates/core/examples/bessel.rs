//! Modified Bessel function of the second kind for real order.

use fracpce::meigd::{bessel_k, bessel_k_scaled, ln_bessel_k};

fn main() -> fracpce::Result<()> {
    println!("   nu        x          K          e^x K         ln K");
    for (nu, x) in [(0.0, 1.0), (0.5, 2.0), (1.3, 0.01), (-2.7, 5.0), (8.5, 30.0), (40.0, 1.0)] {
        println!(
            "{nu:5.1} {x:8.2} {:12.5e} {:12.5e} {:12.5}",
            bessel_k(nu, x)?,
            bessel_k_scaled(nu, x)?,
            ln_bessel_k(nu, x)?
        );
    }
    let x: f64 = 2.0;
    let closed = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
    println!("K_1/2(2) = {:.16e}, closed form {closed:.16e}", bessel_k(0.5, x)?);
    Ok(())
}
