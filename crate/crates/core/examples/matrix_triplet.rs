//! Dominant eigentriplet of the growth matrix for a random kernel,
//! in both growth cases.

use effgrow::model::make_kernel_random;
use effgrow::spectral::{build_growth_matrix, build_growth_matrix_case_b, dominant_eigentriplet};
use effgrow::TraitSet;

fn main() -> effgrow::Result<()> {
    let traits = TraitSet::new(vec![0.5, 1.0, 2.0, 4.0])?;
    let kernel = make_kernel_random(traits.len(), 7)?;
    println!("kernel rows: {:?}", kernel.matrix().row_iter().map(|r| r.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>());

    let a = dominant_eigentriplet(&build_growth_matrix(&traits, &kernel, 1.0)?)?;
    print!("{}", a.to_table().render());
    println!("weighted rate check: {:.3e}", (a.lambda - a.weighted_rate(&traits)).abs());

    let b = dominant_eigentriplet(&build_growth_matrix_case_b(&traits, &kernel)?)?;
    print!("{}", b.to_table().render());
    Ok(())
}
