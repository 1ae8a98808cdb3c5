//! Size-resolved eigenproblem for two traits, compared with the matrix value.

use effgrow::model::make_kernel_bimodal;
use effgrow::numeric::{solve_heterogeneous, Fragmentation, ModelSpec, SolveMethod, SolverOptions};
use effgrow::spectral::effective_trait_bimodal;
use effgrow::{SizeGrid, TraitSet};

fn main() -> effgrow::Result<()> {
    let model = ModelSpec::case_a(
        TraitSet::new(vec![0.5, 2.5])?,
        make_kernel_bimodal(0.3, 0.5)?,
        1.0,
        Fragmentation::Uniform,
    )?;
    let grid = SizeGrid::uniform(0.02, 20.0)?;
    let exact = effective_trait_bimodal(0.5, 2.5, 0.3, 0.5)?;
    for method in [SolveMethod::Power, SolveMethod::Renewal] {
        let opts = SolverOptions {
            method,
            ..SolverOptions::default()
        };
        let eig = solve_heterogeneous(&model, &grid, &opts)?;
        println!(
            "{method:?}: lambda {:.10} (closed form {exact:.10}), masses {:?}, {} iterations",
            eig.lambda, eig.fractions, eig.iterations
        );
    }
    Ok(())
}
