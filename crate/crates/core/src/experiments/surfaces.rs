//! Size-profile datasets for two traits with constant growth and division.

use rayon::prelude::*;

use super::{case_a_triplet, linspace, Params, RunOutput};
use crate::csv::{fmt_f64, Cell, CsvTable};
use crate::error::Result;
use crate::model::{make_kernel_bimodal, TraitSet};
use crate::numeric::{solve_heterogeneous, Fragmentation, ModelSpec, NumericEigen, SolverOptions};
use crate::profiles::{profile_uniform_division, SizeGrid};

struct ProfileSetup {
    grid: SizeGrid,
    opts: SolverOptions,
    traits: TraitSet,
    stride: usize,
}

fn setup(p: &mut Params, dx: f64, xmax: f64, stride: usize) -> Result<ProfileSetup> {
    let dx = p.f64("dx", dx)?;
    let xmax = p.f64("xmax", xmax)?;
    let tol = p.f64("tol", 1e-10)?;
    let v1 = p.f64("v1", 0.5)?;
    let v2 = p.f64("v2", 2.5)?;
    Ok(ProfileSetup {
        grid: SizeGrid::uniform(dx, xmax)?,
        opts: SolverOptions {
            tol,
            ..SolverOptions::default()
        },
        traits: TraitSet::new(vec![v1, v2])?,
        stride: p.usize("stride", stride)?.max(1),
    })
}

/// Numeric Case A solve (uniform fragmentation, `beta = 1`) and the gap to
/// the matrix eigenvalue.
fn solve_point(s: &ProfileSetup, k1: f64, k2: f64) -> Result<(NumericEigen, f64)> {
    let kernel = make_kernel_bimodal(k1, k2)?;
    let model = ModelSpec::case_a(s.traits.clone(), kernel.clone(), 1.0, Fragmentation::Uniform)?;
    let eig = solve_heterogeneous(&model, &s.grid, &s.opts)?;
    let exact = case_a_triplet(&s.traits, |_| Ok(kernel))?.lambda;
    let gap = (eig.lambda - exact).abs();
    Ok((eig, gap))
}

fn consistency_checks(out: &mut RunOutput, points: &[(f64, f64, NumericEigen, f64)]) {
    let worst_gap = points.iter().map(|p| p.3).fold(0.0, f64::max);
    out.check(
        "numeric_lambda_matches_matrix",
        worst_gap < 5e-3,
        format!("max |lambda - lambda_matrix| = {worst_gap:.3e}"),
    );
    let worst_mass = points
        .iter()
        .map(|p| (p.2.fractions.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    out.check(
        "masses_sum_to_one",
        worst_mass < 1e-9,
        format!("max |sum of masses - 1| = {worst_mass:.3e}"),
    );
}

/// Heterogeneous profiles against the homogeneous one and their mass-weighted mean.
pub(crate) fn run_fig2(p: &mut Params) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let s = setup(p, 0.01, 20.0, 5)?;
    let k1 = p.f64("k1", 0.3)?;
    let k2 = p.f64("k2", 0.5)?;
    let (eig, gap) = solve_point(&s, k1, k2)?;
    let homogeneous = profile_uniform_division(1.0, &s.grid)?;

    let n = eig.profile.values();
    let masses = &eig.fractions;
    let mut t = CsvTable::new(&["x", "N_v", "N_1", "N_2", "weighted_mean"]);
    t.meta("lambda", fmt_f64(eig.lambda))
        .meta("v_eff", fmt_f64(eig.lambda))
        .meta("mass_1", fmt_f64(masses[0]))
        .meta("mass_2", fmt_f64(masses[1]));
    for j in (0..s.grid.len()).step_by(s.stride) {
        let n1 = n[0][j] / masses[0];
        let n2 = n[1][j] / masses[1];
        t.push(vec![
            Cell::from(s.grid.nodes()[j]),
            homogeneous.type_values(0)[j].into(),
            n1.into(),
            n2.into(),
            (masses[0] * n1 + masses[1] * n2).into(),
        ]);
    }
    consistency_checks(&mut out, &[(k1, k2, eig, gap)]);
    out.table("fig2.csv", t);
    Ok(out)
}

fn profile_rows(t: &mut CsvTable, s: &ProfileSetup, label: &str, k1: f64, k2: f64, sweep: f64, eig: &NumericEigen) {
    for (i, values) in eig.profile.values().iter().enumerate() {
        for j in (0..s.grid.len()).step_by(s.stride) {
            t.push(vec![
                label.into(),
                k1.into(),
                k2.into(),
                sweep.into(),
                (i + 1).into(),
                s.grid.nodes()[j].into(),
                values[j].into(),
                eig.fractions[i].into(),
            ]);
        }
    }
}

const PROFILE_COLUMNS: [&str; 8] = ["panel", "k1", "k2", "sweep_param", "type", "x", "N", "mass"];

/// `(panel, k1, k2, sweep value)` points solved in parallel, in input order.
fn solve_panels(s: &ProfileSetup, jobs: Vec<(String, f64, f64, f64)>) -> Result<Vec<(String, f64, f64, f64, NumericEigen, f64)>> {
    jobs.into_par_iter()
        .map(|(label, k1, k2, sweep)| {
            let (eig, gap) = solve_point(s, k1, k2)?;
            Ok((label, k1, k2, sweep, eig, gap))
        })
        .collect()
}

fn emit(out: &mut RunOutput, s: &ProfileSetup, name: &str, solved: Vec<(String, f64, f64, f64, NumericEigen, f64)>) {
    let mut t = CsvTable::new(&PROFILE_COLUMNS);
    for (label, k1, k2, sweep, eig, _) in &solved {
        profile_rows(&mut t, s, label, *k1, *k2, *sweep, eig);
    }
    let points: Vec<_> = solved.into_iter().map(|(_, k1, k2, _, e, g)| (k1, k2, e, g)).collect();
    consistency_checks(out, &points);
    out.table(name, t);
}

/// Profiles along `k1 = k2` and `k1 = 1 - k2`.
pub(crate) fn run_fig5_surfaces(p: &mut Params) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let s = setup(p, 0.02, 20.0, 5)?;
    let ks = linspace(p.f64("k_min", 0.05)?, p.f64("k_max", 0.95)?, p.usize("points", 19)?);
    let mut jobs = Vec::new();
    for &k in &ks {
        jobs.push(("k1=k2".to_string(), k, k, k));
    }
    for &k in &ks {
        jobs.push(("k1=1-k2".to_string(), k, 1.0 - k, k));
    }
    let solved = solve_panels(&s, jobs)?;
    emit(&mut out, &s, "fig5_surfaces.csv", solved);
    Ok(out)
}

/// Profiles varying one switching probability with the other fixed.
pub(crate) fn run_figs1(p: &mut Params) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let s = setup(p, 0.02, 20.0, 5)?;
    let ks = linspace(p.f64("k_min", 0.05)?, p.f64("k_max", 0.95)?, p.usize("points", 19)?);
    let fixed = p.f64_list("fixed_values", &[0.2, 0.8])?;
    let mut jobs = Vec::new();
    for &f in &fixed {
        for &k in &ks {
            jobs.push((format!("k2={f}"), k, f, k));
        }
    }
    for &f in &fixed {
        for &k in &ks {
            jobs.push((format!("k1={f}"), f, k, k));
        }
    }
    // Strong heredity of the fast trait leaves the slow one a small share.
    let low_k2 = p.f64("low_k2", 0.01)?;
    let mut worst: f64 = 0.0;
    for &k in &ks {
        let t = case_a_triplet(&s.traits, |_| make_kernel_bimodal(k, low_k2))?;
        worst = worst.max(t.fractions[0]);
    }
    out.check(
        "slow_trait_minor_under_fast_heredity",
        worst < 0.05,
        format!("max mass of type 1 at k2={low_k2}: {worst:.4}"),
    );
    let solved = solve_panels(&s, jobs)?;
    emit(&mut out, &s, "figS1_fractions.csv", solved);
    Ok(out)
}
