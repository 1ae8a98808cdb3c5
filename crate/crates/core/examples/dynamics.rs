//! Time stepping from a localized initial population and convergence towards
//! `rho * exp(lambda t) * N`.

use effgrow::dynamics::{diagnostics, simulate, PopulationState, SimulationOptions, TimeStep};
use effgrow::model::make_kernel_bimodal;
use effgrow::numeric::{solve_heterogeneous, Fragmentation, ModelSpec, SolverOptions};
use effgrow::{SizeGrid, TraitSet};

fn main() -> effgrow::Result<()> {
    let model = ModelSpec::case_a(
        TraitSet::new(vec![0.5, 2.5])?,
        make_kernel_bimodal(0.3, 0.5)?,
        1.0,
        Fragmentation::Uniform,
    )?;
    let grid = SizeGrid::uniform(0.02, 20.0)?;
    let eig = solve_heterogeneous(&model, &grid, &SolverOptions::default())?;
    let start = PopulationState::gaussian(&grid, 2, 0, 1.0, 0.05)?;
    let opts = SimulationOptions {
        t_end: 30.0,
        dt: TimeStep::Auto,
        snapshot_every: 2.0,
    };
    let traj = simulate(&model, &start, &opts)?;
    let d = diagnostics(&traj, &eig)?;
    println!("dt {:.3e}, {} steps, rho {:.6}", traj.dt, traj.steps, d.rho);
    print!("{}", d.to_table().render());
    println!("fitted growth rate {:.6} vs lambda {:.6}", d.fitted_rate, eig.lambda);
    Ok(())
}
