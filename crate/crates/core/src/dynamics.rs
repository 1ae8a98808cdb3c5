//! Explicit time stepping of the heterogeneous growth-fragmentation system
//! and convergence diagnostics toward the Malthusian profile.

use std::path::Path;

use crate::csv::{Cell, CsvTable};
use crate::error::{domain, Error, Result};
use crate::numeric::{AdjointProfile, DiscreteOperator, ModelSpec, NumericEigen};
use crate::profiles::{SizeGrid, SizeProfile};

/// Densities `n_i(t, x_j)` of every type at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    pub time: f64,
    grid: SizeGrid,
    densities: Vec<Vec<f64>>,
}

impl PopulationState {
    pub fn new(grid: SizeGrid, densities: Vec<Vec<f64>>, time: f64) -> Result<Self> {
        for row in &densities {
            if row.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    found: row.len(),
                });
            }
            if let Some(x) = row.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return Err(domain("initial", format!("density {x} is negative")));
            }
        }
        if densities.is_empty() {
            return Err(domain("initial", "no types"));
        }
        Ok(Self {
            time,
            grid,
            densities,
        })
    }

    /// Gaussian bump of unit mass on one type, zero elsewhere.
    pub fn gaussian(grid: &SizeGrid, types: usize, type_index: usize, center: f64, width: f64) -> Result<Self> {
        if type_index >= types {
            return Err(domain("type", format!("{type_index} >= {types}")));
        }
        let bump: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|x| (-0.5 * ((x - center) / width).powi(2)).exp())
            .collect();
        let mass = grid.integrate(&bump);
        let mut densities = vec![vec![0.0; grid.len()]; types];
        densities[type_index] = bump.iter().map(|b| b / mass).collect();
        Self::new(grid.clone(), densities, 0.0)
    }

    /// Indicator of `[a, b]` with unit mass on one type.
    pub fn indicator(grid: &SizeGrid, types: usize, type_index: usize, a: f64, b: f64) -> Result<Self> {
        if type_index >= types {
            return Err(domain("type", format!("{type_index} >= {types}")));
        }
        let ind: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|x| if (a..=b).contains(x) { 1.0 } else { 0.0 })
            .collect();
        let mass = grid.integrate(&ind);
        if mass <= 0.0 {
            return Err(domain("indicator", "interval contains no grid cell"));
        }
        let mut densities = vec![vec![0.0; grid.len()]; types];
        densities[type_index] = ind.iter().map(|v| v / mass).collect();
        Self::new(grid.clone(), densities, 0.0)
    }

    /// `scale * N` for a steady profile `N`.
    pub fn from_profile(profile: &SizeProfile, scale: f64) -> Result<Self> {
        let densities = profile
            .values()
            .iter()
            .map(|v| v.iter().map(|x| scale * x).collect())
            .collect();
        Self::new(profile.grid().clone(), densities, 0.0)
    }

    /// Reads `x, N_1 .. N_M` columns (the profile CSV layout) whose nodes
    /// must coincide with `grid`.
    pub fn from_csv(path: &Path, grid: &SizeGrid) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Config("empty CSV".into()))?;
        let types = header.split(',').count() - 1;
        if types == 0 {
            return Err(Error::Config("CSV needs an x column and at least one density".into()));
        }
        let mut densities = vec![Vec::with_capacity(grid.len()); types];
        for (j, line) in lines.enumerate() {
            let cells = crate::model::parse_number_list(line)?;
            if cells.len() != types + 1 {
                return Err(Error::Config(format!("row {j} has {} cells", cells.len())));
            }
            let x = grid.nodes().get(j).copied().unwrap_or(f64::NAN);
            if (cells[0] - x).abs() > 1e-9 * (1.0 + x.abs()) {
                return Err(Error::Config(format!("row {j}: x = {} is not grid node {x}", cells[0])));
            }
            for (i, d) in densities.iter_mut().enumerate() {
                d.push(cells[i + 1]);
            }
        }
        Self::new(grid.clone(), densities, 0.0)
    }

    pub fn grid(&self) -> &SizeGrid {
        &self.grid
    }

    pub fn densities(&self) -> &[Vec<f64>] {
        &self.densities
    }

    pub fn types(&self) -> usize {
        self.densities.len()
    }

    /// Total number `sum_i int n_i`.
    pub fn mass(&self) -> f64 {
        self.densities.iter().map(|d| self.grid.integrate(d)).sum()
    }

    fn flat(&self) -> Vec<f64> {
        self.densities.concat()
    }
}

/// `rho = sum_i int n_i(0, x) phi_i(x) dx` by trapezoid.
pub fn compute_rho(initial: &PopulationState, adjoint: &AdjointProfile) -> Result<f64> {
    if initial.grid() != adjoint.grid() || initial.types() != adjoint.values().len() {
        return Err(Error::DimensionMismatch {
            expected: adjoint.grid().len() * adjoint.values().len(),
            found: initial.grid().len() * initial.types(),
        });
    }
    Ok(adjoint.pair(initial.densities()))
}

/// Time step choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    /// `0.9 / max(v tau / dx + v tau beta)`.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    pub t_end: f64,
    pub dt: TimeStep,
    /// Time between stored snapshots; the first and last states are always kept.
    pub snapshot_every: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<PopulationState>,
    pub dt: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &PopulationState {
        self.snapshots.last().expect("trajectory holds the initial state")
    }

    /// Columns `t, type, x, n`; every `stride`-th node.
    pub fn to_table(&self, stride: usize) -> CsvTable {
        let mut t = CsvTable::new(&["t", "type", "x", "n"]);
        t.meta("dt", crate::csv::fmt_f64(self.dt));
        for s in &self.snapshots {
            for (i, d) in s.densities().iter().enumerate() {
                for j in (0..d.len()).step_by(stride.max(1)) {
                    t.push(vec![s.time.into(), (i + 1).into(), s.grid().nodes()[j].into(), d[j].into()]);
                }
            }
        }
        t
    }
}

/// Largest stable explicit step: every diagonal entry of `Id + dt L` stays
/// nonnegative with a 10% margin.
pub fn stable_dt(op: &DiscreteOperator) -> f64 {
    0.9 / op.shift()
}

/// Explicit Euler with the same spatial operator as the eigensolver.
pub fn simulate(model: &ModelSpec, initial: &PopulationState, opts: &SimulationOptions) -> Result<Trajectory> {
    let op = DiscreteOperator::discretize(model, initial.grid())?;
    if initial.types() != op.types() {
        return Err(Error::DimensionMismatch {
            expected: op.types(),
            found: initial.types(),
        });
    }
    if !(opts.t_end > 0.0 && opts.t_end.is_finite()) {
        return Err(domain("t_end", format!("{} is not positive", opts.t_end)));
    }
    let bound = stable_dt(&op);
    let dt_req = match opts.dt {
        TimeStep::Auto => bound,
        TimeStep::Fixed(dt) => {
            if !(dt > 0.0) {
                return Err(domain("dt", format!("{dt} is not positive")));
            }
            if dt > bound {
                return Err(Error::Stability { dt, bound });
            }
            dt
        }
    };
    let steps = (opts.t_end / dt_req).ceil() as usize;
    let dt = opts.t_end / steps as f64;
    let stride = ((opts.snapshot_every / dt).round() as usize).max(1);

    let nk = op.nodes();
    let mut n = initial.flat();
    if op.pins_origin() {
        for i in 0..op.types() {
            n[i * nk] = 0.0;
        }
    }
    let mut ln = vec![0.0; n.len()];
    let snapshot = |n: &[f64], time: f64| PopulationState {
        time,
        grid: initial.grid().clone(),
        densities: n.chunks(nk).map(|c| c.to_vec()).collect(),
    };
    let mut snapshots = vec![snapshot(&n, initial.time)];
    for step in 1..=steps {
        op.apply(&n, &mut ln);
        for (a, b) in n.iter_mut().zip(&ln) {
            *a += dt * b;
        }
        let time = initial.time + step as f64 * dt;
        if let Some(k) = n.iter().position(|x| *x < 0.0) {
            return Err(Error::NegativeDensity {
                type_index: k / nk,
                node: k % nk,
                time,
                value: n[k],
            });
        }
        if step % stride == 0 || step == steps {
            snapshots.push(snapshot(&n, time));
        }
    }
    Ok(Trajectory { snapshots, dt, steps })
}

/// Drift allowance per unit of `dt + dx` for the φ-weighted mass.
pub const CONSERVATION_CONSTANT: f64 = 1e-4;

/// Time series measuring convergence to `rho N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceDiagnostics {
    pub rho: f64,
    pub lambda: f64,
    /// Per-step growth `ln(1 + lambda dt) / dt` of the explicit scheme.
    pub discrete_rate: f64,
    pub times: Vec<f64>,
    /// `exp(-rate t) sum_i int n_i phi_i`.
    pub phi_weighted_mass: Vec<f64>,
    /// `sum_i int |exp(-rate t) n_i - rho N_i| phi_i`.
    pub l1_phi_distance: Vec<f64>,
    pub raw_mass: Vec<f64>,
    /// `max_t |phi_weighted_mass - rho| / rho`.
    pub max_mass_drift: f64,
    /// `CONSERVATION_CONSTANT * (dt + dx)`.
    pub conservation_tolerance: f64,
    /// Least-squares slope of `ln(raw_mass)` over the second half of the run.
    pub fitted_rate: f64,
}

impl ConvergenceDiagnostics {
    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(&["t", "phi_weighted_mass", "l1_phi_distance", "raw_mass"]);
        t.meta("rho", crate::csv::fmt_f64(self.rho))
            .meta("lambda", crate::csv::fmt_f64(self.lambda))
            .meta("discrete_rate", crate::csv::fmt_f64(self.discrete_rate))
            .meta("conservation_tolerance", crate::csv::fmt_f64(self.conservation_tolerance));
        for k in 0..self.times.len() {
            t.push(vec![
                Cell::from(self.times[k]),
                self.phi_weighted_mass[k].into(),
                self.l1_phi_distance[k].into(),
                self.raw_mass[k].into(),
            ]);
        }
        t
    }
}

/// Series of the φ-weighted mass and the L¹(φ) distance to `rho N`, both
/// rescaled by the growth factor of the explicit scheme.
pub fn diagnostics(trajectory: &Trajectory, eigen: &NumericEigen) -> Result<ConvergenceDiagnostics> {
    let first = &trajectory.snapshots[0];
    let rho = compute_rho(first, &eigen.adjoint)?;
    let lambda = eigen.lambda;
    let dt = trajectory.dt;
    let rate = (lambda * dt).ln_1p() / dt;
    let grid = first.grid();
    let w = grid.weights();
    let profile = eigen.profile.values();
    let adjoint = eigen.adjoint.values();

    let mut times = Vec::new();
    let mut phi_mass = Vec::new();
    let mut dist = Vec::new();
    let mut raw = Vec::new();
    for s in &trajectory.snapshots {
        let t = s.time - first.time;
        let damp = (-rate * t).exp();
        let mut pm = 0.0;
        let mut d = 0.0;
        for (i, n) in s.densities().iter().enumerate() {
            for j in 0..n.len() {
                let phi = adjoint[i][j];
                pm += w[j] * n[j] * phi;
                d += w[j] * (damp * n[j] - rho * profile[i][j]).abs() * phi;
            }
        }
        times.push(s.time);
        phi_mass.push(damp * pm);
        dist.push(d);
        raw.push(s.mass());
    }
    let max_mass_drift = phi_mass
        .iter()
        .map(|p| ((p - rho) / rho).abs())
        .fold(0.0, f64::max);
    let dx = grid.max_spacing();
    Ok(ConvergenceDiagnostics {
        rho,
        lambda,
        discrete_rate: rate,
        fitted_rate: second_half_slope(&times, &raw),
        times,
        phi_weighted_mass: phi_mass,
        l1_phi_distance: dist,
        raw_mass: raw,
        max_mass_drift,
        conservation_tolerance: CONSERVATION_CONSTANT * (dt + dx),
    })
}

fn second_half_slope(times: &[f64], mass: &[f64]) -> f64 {
    let start = times.len() / 2;
    let xs = &times[start..];
    let ys: Vec<f64> = mass[start..].iter().map(|m| m.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
