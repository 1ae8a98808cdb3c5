//! Equal mitosis with linear growth, solved on a size grid.

use rayon::prelude::*;

use super::sweeps::alpha_grid;
use super::{linspace, Params, RunOutput};
use crate::csv::{Cell, CsvTable};
use crate::error::{Error, Result};
use crate::model::{make_kernel_alpha, make_kernel_noheredity, make_trait_set, sigma_limit, MeanKind};
use crate::numeric::{solve_heterogeneous, Fragmentation, Growth, ModelSpec, SolveMethod, SolverOptions};
use crate::profiles::{DivisionRate, SizeGrid};

struct Row {
    beta: &'static str,
    kind: MeanKind,
    sigma: f64,
    alpha: f64,
    outcome: Outcome,
}

enum Outcome {
    Solved {
        lambda: f64,
        residual: f64,
        iterations: usize,
        bounds: (f64, f64),
    },
    NoConvergence { iterations: usize, residual: f64 },
    Skipped,
}

/// Effective trait against σ and α for `tau = x`, mitosis, `beta` in `{1, x}`.
pub(crate) fn run_figs2(p: &mut Params) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let m = p.usize("m", 10)?;
    let vbar = p.f64("vbar", 4.0)?;
    let sigmas = linspace(0.0, p.f64("sigma_max", 7.6)?, p.usize("sigma_points", 11)?);
    let alphas = alpha_grid(m, &p.f64_list("alphas", &[0.0, 0.3, 0.7, 0.9])?);
    let tol = p.f64("tol", 1e-10)?;
    // Constant rate leaves a polynomial tail and needs the longer domain.
    let grid_one = SizeGrid::uniform(p.f64("dx_beta1", 0.02)?, p.f64("xmax_beta1", 30.0)?)?;
    let grid_x = SizeGrid::uniform(p.f64("dx_betax", 0.01)?, p.f64("xmax_betax", 10.0)?)?;
    let opts = SolverOptions {
        tol,
        method: SolveMethod::Renewal,
        ..SolverOptions::default()
    };

    let mut jobs = Vec::new();
    for beta in ["1", "x"] {
        for kind in MeanKind::ALL {
            for &sigma in &sigmas {
                for &alpha in &alphas {
                    jobs.push((beta, kind, sigma, alpha));
                }
            }
        }
    }
    let rows: Vec<Row> = jobs
        .into_par_iter()
        .map(|(beta, kind, sigma, alpha)| {
            let mut row = Row {
                beta,
                kind,
                sigma,
                alpha,
                outcome: Outcome::Skipped,
            };
            if sigma >= sigma_limit(vbar, kind) {
                return Ok(row);
            }
            let traits = make_trait_set(m, sigma, vbar, kind)?;
            let kernel = if traits.len() == 1 {
                make_kernel_noheredity(&[1.0])?
            } else {
                make_kernel_alpha(m, alpha)?
            };
            let (rate, grid) = match beta {
                "1" => (DivisionRate::constant(1.0)?, &grid_one),
                _ => (DivisionRate::power(1.0, 2.0)?, &grid_x),
            };
            let bounds = (traits.min(), traits.max());
            let model = ModelSpec::new(Growth::Linear, rate, Fragmentation::Mitosis, traits, kernel)?;
            row.outcome = match solve_heterogeneous(&model, grid, &opts) {
                Ok(e) => Outcome::Solved {
                    lambda: e.lambda,
                    residual: e.residual,
                    iterations: e.iterations,
                    bounds,
                },
                Err(Error::Convergence { iterations, residual, .. }) => Outcome::NoConvergence { iterations, residual },
                Err(other) => return Err(other),
            };
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut zero_gap: f64 = 0.0;
    let mut outside = 0;
    for r in &rows {
        if let Outcome::Solved { lambda, bounds, .. } = r.outcome {
            if r.sigma == 0.0 {
                zero_gap = zero_gap.max((lambda - vbar).abs());
            }
            if lambda < bounds.0 - 1e-6 || lambda > bounds.1 + 1e-6 {
                outside += 1;
            }
        }
    }
    out.check(
        "homogeneous_rate_equals_trait",
        zero_gap < 1e-6,
        format!("max |lambda - vbar| at sigma=0: {zero_gap:.3e}"),
    );
    out.check("v_eff_within_trait_bounds", outside == 0, format!("{outside} rows outside [v1, vM]"));

    let mut t = CsvTable::new(&[
        "beta",
        "mean_kind",
        "sigma",
        "alpha",
        "lambda",
        "v_eff_reported",
        "residual",
        "iterations",
        "status",
    ]);
    t.meta("M", m).meta("vbar", vbar);
    let empty = || Cell::Text(String::new());
    for r in &rows {
        let mut row = vec![Cell::from(r.beta), r.kind.label().into(), r.sigma.into(), r.alpha.into()];
        match r.outcome {
            Outcome::Solved {
                lambda,
                residual,
                iterations,
                ..
            } => row.extend([lambda.into(), lambda.into(), residual.into(), iterations.into(), "ok".into()]),
            Outcome::NoConvergence { iterations, residual } => {
                row.extend([empty(), empty(), residual.into(), iterations.into(), "no_convergence".into()])
            }
            Outcome::Skipped => row.extend([empty(), empty(), empty(), empty(), "skipped_sigma_out_of_range".into()]),
        }
        t.push(row);
    }
    out.table("figS2_mitosis.csv", t);
    Ok(out)
}
