//! Analytic steady size distributions for the homogeneous models.

use effgrow::profiles::{
    profile_caseb_homogeneous, profile_mitosis_series, profile_uniform_division, DivisionRate,
};
use effgrow::SizeGrid;

fn main() -> effgrow::Result<()> {
    let grid = SizeGrid::uniform(0.05, 10.0)?;
    let uniform = profile_uniform_division(1.0, &grid)?;
    let mitosis = profile_mitosis_series(1.0, &grid)?;
    let linear = profile_caseb_homogeneous(&DivisionRate::power(1.0, 2.0)?, &grid)?;
    println!("x,uniform,mitosis,linear_growth");
    for j in (0..grid.len()).step_by(20) {
        println!(
            "{:.2},{:.6},{:.6},{:.6}",
            grid.nodes()[j],
            uniform.type_values(0)[j],
            mitosis.type_values(0)[j],
            linear.type_values(0)[j]
        );
    }
    println!("masses: {:.6} {:.6} {:.6}", uniform.mass(), mitosis.mass(), linear.mass());
    Ok(())
}
