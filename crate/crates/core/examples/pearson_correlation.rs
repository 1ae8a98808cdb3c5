//! Mother/daughter trait correlation under the alpha-family kernel.

use effgrow::model::{pearson_correlation_alpha, TraitSet};

fn main() -> effgrow::Result<()> {
    let traits = TraitSet::new(vec![1.0, 2.0, 4.0, 8.0])?;
    let uniform = [0.25; 4];
    let skewed = [0.4, 0.3, 0.2, 0.1];
    println!("alpha,gamma_uniform,gamma_skewed");
    for alpha in [0.0, 0.25, 0.5, 0.75, 0.95] {
        let u = pearson_correlation_alpha(4, alpha, &uniform, &traits)?;
        let s = pearson_correlation_alpha(4, alpha, &skewed, &traits)?;
        println!("{alpha},{:.6},{:.6}", u.gamma, s.gamma);
    }
    Ok(())
}
