//! Quarter-car response to a half-sine bump.

use fracpce::models::quarter_car::{energy, simulate, Integrator};
use fracpce::models::{quarter_car_solve, QuarterCarConfig};

fn main() -> fracpce::Result<()> {
    let (c_s, k_s, k_t) = (1e4, 4.8e4, 2e5);
    let cfg = QuarterCarConfig::default();
    let traj = simulate(c_s, k_s, k_t, &cfg)?;
    println!("max stroke {:.5} m of {} m, g = {:.5}", traj.max_stroke, cfg.x_c, quarter_car_solve(c_s, k_s, k_t, &cfg)?);
    for k in (0..traj.times.len()).step_by(500) {
        let s = &traj.states[k];
        println!("t = {:4.2}  stroke {:+.5}  energy {:.4e}", traj.times[k], s[2], energy(s, k_s, k_t, &cfg));
    }
    let rk4 = QuarterCarConfig { integrator: Integrator::Rk4, ..cfg };
    println!("rk4 g = {:.8}", quarter_car_solve(c_s, k_s, k_t, &rk4)?);
    let scaled = cfg.auto_scaled(c_s, k_s, k_t, 0.6)?;
    println!("bump scaled for 60% stroke: g = {:.5}", quarter_car_solve(c_s, k_s, k_t, &scaled)?);
    Ok(())
}
