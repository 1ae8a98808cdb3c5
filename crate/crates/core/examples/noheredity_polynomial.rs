//! Daughters drawn independently of the mother: the Malthus parameter is the
//! root of a polynomial, compared here with the power method.

use effgrow::model::make_kernel_noheredity;
use effgrow::spectral::{build_growth_matrix, dominant_eigentriplet, noheredity_polynomial, solve_noheredity};
use effgrow::TraitSet;

fn main() -> effgrow::Result<()> {
    let traits = TraitSet::new(vec![0.3, 0.9, 1.7, 3.2, 5.0])?;
    let weights = [0.1, 0.3, 0.2, 0.25, 0.15];
    let poly = noheredity_polynomial(&traits, &weights)?;
    println!("degree {}, coefficients {:?}", poly.degree(), poly.coefficients);

    let root = solve_noheredity(&traits, &weights)?;
    let power = dominant_eigentriplet(&build_growth_matrix(&traits, &make_kernel_noheredity(&weights)?, 1.0)?)?;
    println!("polynomial root {:.12}", root.lambda);
    println!("power method    {:.12}", power.lambda);
    println!("residual at root {:.3e}", poly.eval(root.lambda));
    Ok(())
}
