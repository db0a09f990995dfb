//! Clamped plate under uniform pressure: deflection and a field dump.

use fracpce::models::{PlateConfig, PlateModel, PlateQoi};

fn main() -> fracpce::Result<()> {
    for n in [4, 10, 20] {
        let cfg = PlateConfig { elements_per_side: n, ..PlateConfig::default() };
        let model = PlateModel::new(cfg)?;
        println!(
            "{n:2}x{n:<2} mesh: {} DOFs, bandwidth {}, max deflection {:.6e} m",
            model.active_dofs(),
            model.bandwidth(),
            model.solve(2.1e11, 5e-3, 0.3)?
        );
    }
    let cfg = PlateConfig { qoi: PlateQoi::FreeEdgeMid, ..PlateConfig::default() };
    let model = PlateModel::new(cfg)?;
    println!("free-edge midpoint deflection {:.6e} m", model.solve(2.1e11, 5e-3, 0.3)?);
    let path = std::env::temp_dir().join("plate_field.csv");
    model.write_field_csv(&path, 2.1e11, 5e-3, 0.3)?;
    println!("field written to {}", path.display());
    Ok(())
}
