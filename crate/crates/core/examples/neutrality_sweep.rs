//! Effective trait as the trait spread grows, for kernels on both sides of the
//! neutral heredity level `alpha0 = 1/M`.

use effgrow::model::{alpha_threshold, make_kernel_alpha, make_trait_set, sigma_limit, MeanKind};
use effgrow::spectral::{build_growth_matrix, dominant_eigentriplet};

fn main() -> effgrow::Result<()> {
    let m = 10;
    let vbar = 4.0;
    let a0 = alpha_threshold(m);
    println!("alpha,sigma,v_eff");
    for alpha in [0.0, a0, 0.5, 0.9] {
        for i in 0..8 {
            let sigma = i as f64;
            if sigma >= sigma_limit(vbar, MeanKind::Arithmetic) {
                continue;
            }
            let traits = make_trait_set(m, sigma, vbar, MeanKind::Arithmetic)?;
            let v = if traits.len() == 1 {
                traits.values()[0]
            } else {
                dominant_eigentriplet(&build_growth_matrix(&traits, &make_kernel_alpha(m, alpha)?, 1.0)?)?.effective_trait
            };
            println!("{alpha:.3},{sigma},{v:.6}");
        }
    }
    Ok(())
}
