use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CaseTag, DiscreteOperator, ModelSpec};
use crate::csv::{Cell, CsvTable};
use crate::error::{domain, Error, Result};
use crate::profiles::{SizeGrid, SizeProfile};

/// Iteration used to find the dominant eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveMethod {
    /// Power iteration on `L + c Id`.
    Power,
    /// Root in `lambda` of the spectral radius of the generation operator
    /// `Gamma (lambda + transport + loss)^{-1}`.
    Renewal,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMethod::Power => "power",
            SolveMethod::Renewal => "renewal",
        })
    }
}

impl FromStr for SolveMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(SolveMethod::Power),
            "renewal" => Ok(SolveMethod::Renewal),
            other => Err(domain("method", format!("`{other}` is not power or renewal"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative eigenvalue change at convergence; the residual must be
    /// below `10 * tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub method: SolveMethod,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 1_000_000,
            method: SolveMethod::Power,
        }
    }
}

/// Left eigenfunction on the grid, one row per type.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointProfile {
    grid: SizeGrid,
    values: Vec<Vec<f64>>,
}

impl AdjointProfile {
    pub fn grid(&self) -> &SizeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn type_values(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    /// `sum_i int f_i phi_i` by trapezoid.
    pub fn pair(&self, f: &[Vec<f64>]) -> f64 {
        let w = self.grid.weights();
        self.values
            .iter()
            .zip(f)
            .map(|(p, f)| p.iter().zip(f).zip(&w).map(|((a, b), w)| a * b * w).sum::<f64>())
            .sum()
    }

    /// Columns `x, phi_1 .. phi_M`.
    pub fn to_table(&self, stride: usize) -> CsvTable {
        let mut cols = vec!["x".to_string()];
        cols.extend((1..=self.values.len()).map(|i| format!("phi_{i}")));
        let mut t = CsvTable::new(&cols);
        for j in (0..self.grid.len()).step_by(stride.max(1)) {
            let mut row = vec![Cell::from(self.grid.nodes()[j])];
            row.extend(self.values.iter().map(|v| Cell::from(v[j])));
            t.push(row);
        }
        t
    }
}

/// Dominant eigentriple of the discrete operator.
#[derive(Debug, Clone)]
pub struct NumericEigen {
    pub lambda: f64,
    /// Unit-mass steady profile.
    pub profile: SizeProfile,
    /// Adjoint scaled so that `sum_i int N_i phi_i = 1`.
    pub adjoint: AdjointProfile,
    /// Per-type masses of the profile.
    pub fractions: Vec<f64>,
    /// `|L N - lambda N|_1 / (lambda |N|_1)` with trapezoid weights.
    pub residual: f64,
    pub iterations: usize,
    pub method: SolveMethod,
    pub case: CaseTag,
    pub effective_trait: Option<f64>,
}

impl NumericEigen {
    pub fn summary_columns(m: usize) -> Vec<String> {
        let mut cols: Vec<String> = ["M", "case", "method", "lambda", "v_eff", "residual", "iterations"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        cols.extend((1..=m).map(|i| format!("N_{i}")));
        cols
    }

    pub fn summary_row(&self) -> Vec<Cell> {
        let mut row = vec![
            Cell::from(self.fractions.len()),
            self.case.to_string().into(),
            self.method.to_string().into(),
            self.lambda.into(),
            self.effective_trait.map_or(Cell::Text(String::new()), Cell::Num),
            self.residual.into(),
            self.iterations.into(),
        ];
        row.extend(self.fractions.iter().map(|x| Cell::from(*x)));
        row
    }

    /// Profile as one flat type-major vector.
    pub fn flat_profile(&self) -> Vec<f64> {
        self.profile.values().concat()
    }

    /// Adjoint as one flat type-major vector.
    pub fn flat_adjoint(&self) -> Vec<f64> {
        self.adjoint.values().concat()
    }
}

/// Shifted power iteration on the operator and its transpose.
pub fn solve_eigen(op: &DiscreteOperator, tol: f64) -> Result<NumericEigen> {
    solve_with(
        op,
        &SolverOptions {
            tol,
            ..SolverOptions::default()
        },
    )
}

/// Renewal iteration; same outputs as [`solve_eigen`].
pub fn solve_eigen_renewal(op: &DiscreteOperator, tol: f64) -> Result<NumericEigen> {
    solve_with(
        op,
        &SolverOptions {
            tol,
            method: SolveMethod::Renewal,
            ..SolverOptions::default()
        },
    )
}

/// Discretizes `model` on `grid` and solves it.
pub fn solve_heterogeneous(model: &ModelSpec, grid: &SizeGrid, opts: &SolverOptions) -> Result<NumericEigen> {
    let op = DiscreteOperator::discretize(model, grid)?;
    let mut sol = solve_with(&op, opts)?;
    sol.case = model.case_tag();
    sol.effective_trait = model.effective_trait(sol.lambda);
    Ok(sol)
}

fn solve_with(op: &DiscreteOperator, opts: &SolverOptions) -> Result<NumericEigen> {
    if !(opts.tol > 0.0) {
        return Err(domain("tol", format!("{} is not positive", opts.tol)));
    }
    let (lambda, n, psi, iterations) = match opts.method {
        SolveMethod::Power => {
            let (lambda, n, it_r) = power_right(op, opts)?;
            let (psi, it_l) = power_left(op, opts)?;
            (lambda, n, psi, it_r + it_l)
        }
        SolveMethod::Renewal => renewal(op, opts)?,
    };
    let mut ln = vec![0.0; op.len()];
    op.apply(&n, &mut ln);
    let defect: Vec<f64> = ln.iter().zip(&n).map(|(a, b)| a - lambda * b).collect();
    let residual = op.integrate_abs(&defect) / (lambda.abs() * op.integrate_abs(&n));
    if !(residual < 10.0 * opts.tol) {
        return Err(Error::Convergence {
            iterations,
            residual,
            history: vec![residual],
        });
    }
    assemble(op, lambda, n, psi, residual, iterations, opts.method)
}

fn assemble(
    op: &DiscreteOperator,
    lambda: f64,
    n: Vec<f64>,
    psi: Vec<f64>,
    residual: f64,
    iterations: usize,
    method: SolveMethod,
) -> Result<NumericEigen> {
    let nk = op.nodes();
    let w = op.weights();
    let grid = op.grid().clone();
    let values: Vec<Vec<f64>> = n.chunks(nk).map(|c| c.to_vec()).collect();
    let profile = SizeProfile::normalized(grid.clone(), values)?;
    let flat = profile.values().concat();
    let pairing: f64 = psi.iter().zip(&flat).map(|(a, b)| a * b).sum();
    if !(pairing > 0.0) {
        return Err(Error::Inconsistency("adjoint does not pair with the profile".into()));
    }
    let adjoint_values: Vec<Vec<f64>> = psi
        .chunks(nk)
        .map(|c| {
            let mut phi: Vec<f64> = c.iter().zip(w).map(|(p, w)| p / (w * pairing)).collect();
            if op.pins_origin() {
                phi[0] = phi[1];
            }
            phi
        })
        .collect();
    let fractions = profile.masses();
    Ok(NumericEigen {
        lambda,
        profile,
        adjoint: AdjointProfile {
            grid,
            values: adjoint_values,
        },
        fractions,
        residual,
        iterations,
        method,
        case: CaseTag::Custom,
        effective_trait: None,
    })
}

fn start_vector(op: &DiscreteOperator) -> Vec<f64> {
    let mut x = vec![1.0; op.len()];
    if op.pins_origin() {
        for i in 0..op.types() {
            x[i * op.nodes()] = 0.0;
        }
    }
    x
}

fn power_right(op: &DiscreteOperator, opts: &SolverOptions) -> Result<(f64, Vec<f64>, usize)> {
    let c = op.shift();
    let mut n = start_vector(op);
    let mass = op.integrate(&n);
    n.iter_mut().for_each(|x| *x /= mass);
    let mut y = vec![0.0; op.len()];
    let mut prev = f64::NAN;
    let mut history = Vec::new();
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        op.apply(&n, &mut y);
        for (a, b) in y.iter_mut().zip(&n) {
            *a += c * b;
        }
        let mu = op.integrate(&y);
        let lambda = mu - c;
        let defect = weighted_defect(op, &y, &n, mu);
        residual = defect / lambda.abs();
        let change = ((lambda - prev) / lambda).abs();
        for (a, b) in n.iter_mut().zip(&y) {
            *a = b / mu;
        }
        if change < opts.tol && residual < 10.0 * opts.tol {
            return Ok((lambda, n, it));
        }
        prev = lambda;
        if it % 1000 == 0 {
            history.push(residual);
        }
    }
    Err(Error::Convergence {
        iterations: opts.max_iter,
        residual,
        history,
    })
}

/// `sum_ij omega_j |y_ij - mu n_ij|`.
fn weighted_defect(op: &DiscreteOperator, y: &[f64], n: &[f64], mu: f64) -> f64 {
    let nk = op.nodes();
    let w = op.weights();
    y.iter()
        .zip(n)
        .enumerate()
        .map(|(k, (a, b))| w[k % nk] * (a - mu * b).abs())
        .sum()
}

fn power_left(op: &DiscreteOperator, opts: &SolverOptions) -> Result<(Vec<f64>, usize)> {
    let c = op.shift();
    let mut psi = start_vector(op);
    let total: f64 = psi.iter().sum();
    psi.iter_mut().for_each(|x| *x /= total);
    let mut y = vec![0.0; op.len()];
    let mut prev = f64::NAN;
    let mut history = Vec::new();
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        op.apply_transpose(&psi, &mut y);
        for (a, b) in y.iter_mut().zip(&psi) {
            *a += c * b;
        }
        let mu: f64 = y.iter().sum();
        let lambda = mu - c;
        residual = y.iter().zip(&psi).map(|(a, b)| (a - mu * b).abs()).sum::<f64>() / lambda.abs();
        let change = ((lambda - prev) / lambda).abs();
        for (a, b) in psi.iter_mut().zip(&y) {
            *a = b / mu;
        }
        if change < opts.tol && residual < 10.0 * opts.tol {
            return Ok((psi, it));
        }
        prev = lambda;
        if it % 1000 == 0 {
            history.push(residual);
        }
    }
    Err(Error::Convergence {
        iterations: opts.max_iter,
        residual,
        history,
    })
}

/// Perron root of `Gamma D_lambda^{-1}` by power iteration from `s`.
struct Generation<'a> {
    op: &'a DiscreteOperator,
    n: Vec<f64>,
    t: Vec<f64>,
    iterations: usize,
    max_iter: usize,
    tol: f64,
}

impl Generation<'_> {
    fn radius(&mut self, lambda: f64, s: &mut Vec<f64>) -> Result<f64> {
        let mut prev = f64::NAN;
        loop {
            self.op.solve_transport(lambda, s, &mut self.n);
            self.op.gain(&self.n, &mut self.t);
            let r: f64 = self.t.iter().sum::<f64>() / s.iter().sum::<f64>();
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Inconsistency(format!("generation radius {r} at lambda = {lambda}")));
            }
            let total: f64 = self.t.iter().sum();
            let mut change = 0.0;
            for (a, b) in s.iter_mut().zip(&self.t) {
                let next = b / total;
                change += (next - *a).abs();
                *a = next;
            }
            self.iterations += 1;
            if change < self.tol && ((r - prev) / r).abs() < self.tol {
                return Ok(r);
            }
            prev = r;
            if self.iterations >= self.max_iter {
                return Err(Error::Convergence {
                    iterations: self.iterations,
                    residual: change,
                    history: vec![change],
                });
            }
        }
    }
}

fn renewal(op: &DiscreteOperator, opts: &SolverOptions) -> Result<(f64, Vec<f64>, Vec<f64>, usize)> {
    let inner_tol = (0.01 * opts.tol).max(1e-15);
    let mut gen = Generation {
        op,
        n: vec![0.0; op.len()],
        t: vec![0.0; op.len()],
        iterations: 0,
        max_iter: opts.max_iter,
        tol: inner_tol,
    };
    let mut s = start_vector(op);
    let total: f64 = s.iter().sum();
    s.iter_mut().for_each(|x| *x /= total);

    // ln r(lambda) decreases in lambda; bracket its root.
    let guess = op.rate_hint();
    let mut f_guess = gen.radius(guess, &mut s)?.ln();
    let (mut lo, mut f_lo, mut hi, mut f_hi);
    if f_guess > 0.0 {
        lo = guess;
        f_lo = f_guess;
        hi = guess;
        loop {
            hi *= 2.0;
            f_hi = gen.radius(hi, &mut s)?.ln();
            if f_hi <= 0.0 {
                break;
            }
            lo = hi;
            f_lo = f_hi;
            check_bracket(hi)?;
        }
    } else {
        hi = guess;
        f_hi = f_guess;
        lo = guess;
        loop {
            lo *= 0.5;
            f_lo = gen.radius(lo, &mut s)?.ln();
            if f_lo >= 0.0 {
                break;
            }
            hi = lo;
            f_hi = f_lo;
            check_bracket(1.0 / lo)?;
        }
    }

    // Illinois regula falsi.
    let mut lambda = lo;
    let mut side = 0i8;
    for _ in 0..500 {
        let next = if f_hi == f_lo {
            0.5 * (lo + hi)
        } else {
            (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        };
        let next = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        let step = (next - lambda).abs();
        lambda = next;
        f_guess = gen.radius(lambda, &mut s)?.ln();
        if f_guess == 0.0 || step < 0.1 * opts.tol * lambda || hi - lo < 0.1 * opts.tol * lambda {
            break;
        }
        if f_guess > 0.0 {
            lo = lambda;
            f_lo = f_guess;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = lambda;
            f_hi = f_guess;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
    }

    let mut n = vec![0.0; op.len()];
    op.solve_transport(lambda, &s, &mut n);

    // Adjoint: Perron vector of D_lambda^{-T} Gamma^T.
    let mut u = start_vector(op);
    let total: f64 = u.iter().sum();
    u.iter_mut().for_each(|x| *x /= total);
    let mut g = vec![0.0; op.len()];
    let mut next = vec![0.0; op.len()];
    let mut prev = f64::NAN;
    loop {
        op.gain_transpose(&u, &mut g);
        op.solve_transport_transpose(lambda, &g, &mut next);
        let r: f64 = next.iter().sum();
        let mut change = 0.0;
        for (a, b) in u.iter_mut().zip(&next) {
            let v = b / r;
            change += (v - *a).abs();
            *a = v;
        }
        gen.iterations += 1;
        if change < inner_tol && ((r - prev) / r).abs() < inner_tol {
            break;
        }
        prev = r;
        if gen.iterations >= opts.max_iter {
            return Err(Error::Convergence {
                iterations: gen.iterations,
                residual: change,
                history: vec![change],
            });
        }
    }
    Ok((lambda, n, u, gen.iterations))
}

fn check_bracket(scale: f64) -> Result<()> {
    if scale > 1e300 || !scale.is_finite() {
        Err(Error::Inconsistency("no sign change of the generation radius".into()))
    } else {
        Ok(())
    }
}
