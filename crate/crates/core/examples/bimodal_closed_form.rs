//! Effective trait of two traits over a few switching probabilities.
//!
//! Run with `cargo run --example bimodal_closed_form`.

use effgrow::spectral::{bimodal_limit_k1_to_zero, effective_trait_bimodal};

fn main() -> effgrow::Result<()> {
    let (v1, v2) = (0.5, 2.5);
    println!("k1,k2,v_eff");
    for k1 in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for k2 in [0.1, 0.5, 0.9] {
            println!("{k1},{k2},{:.6}", effective_trait_bimodal(v1, v2, k1, k2)?);
        }
    }
    println!("geometric mean sqrt(v1 v2) = {:.6}", (v1 * v2).sqrt());
    println!("k1 -> 0 limit at k2 = 0.2: {:.6}", bimodal_limit_k1_to_zero(v1, v2, 0.2)?);
    Ok(())
}
