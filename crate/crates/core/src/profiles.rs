//! Size grids and analytic steady size distributions.

use std::fmt;

use crate::csv::{Cell, CsvTable};
use crate::error::{domain, Error, Result};
use crate::model::{HeredityKernel, TraitSet};
use crate::spectral::{build_growth_matrix_case_b, dominant_eigentriplet, EigenTriplet};

/// Nodes `0 = x_0 < x_1 < ... < x_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeGrid {
    nodes: Vec<f64>,
    step: Option<f64>,
}

impl SizeGrid {
    /// `x_j = j * dx` for `j = 0..=K` with `K = x_max / dx`.
    pub fn uniform(dx: f64, x_max: f64) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(domain("dx", format!("{dx} is not strictly positive")));
        }
        if !(x_max.is_finite() && x_max > dx) {
            return Err(domain("x_max", format!("{x_max} must exceed dx = {dx}")));
        }
        let k = (x_max / dx).round();
        if ((k * dx - x_max) / x_max).abs() > 1e-9 {
            return Err(domain(
                "x_max",
                format!("{x_max} is not an integer multiple of dx = {dx}"),
            ));
        }
        let k = k as usize;
        Ok(Self {
            nodes: (0..=k).map(|j| j as f64 * dx).collect(),
            step: Some(dx),
        })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != 0.0 {
            return Err(domain("nodes", "need at least two nodes starting at 0"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(domain("nodes", "nodes must be strictly increasing"));
        }
        Ok(Self { nodes, step: None })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of nodes, `K + 1`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Uniform step, if any.
    pub fn step(&self) -> Option<f64> {
        self.step
    }

    pub fn x_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Composite trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.nodes.len();
        let mut w = vec![0.0; n];
        for j in 0..n - 1 {
            let h = self.nodes[j + 1] - self.nodes[j];
            w[j] += 0.5 * h;
            w[j + 1] += 0.5 * h;
        }
        w
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights().iter().zip(f).map(|(w, y)| w * y).sum()
    }

    /// Index of the node closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        match self.nodes.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(j) => j,
            Err(0) => 0,
            Err(j) if j >= self.nodes.len() => self.nodes.len() - 1,
            Err(j) => {
                if x - self.nodes[j - 1] <= self.nodes[j] - x {
                    j - 1
                } else {
                    j
                }
            }
        }
    }
}

/// Division rate per unit size `beta(x) = coef * x^(n-1)`, `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisionRate {
    pub coef: f64,
    pub n: f64,
}

impl DivisionRate {
    pub fn constant(beta: f64) -> Result<Self> {
        Self::power(beta, 1.0)
    }

    pub fn power(coef: f64, n: f64) -> Result<Self> {
        if !(coef.is_finite() && coef > 0.0) {
            return Err(domain("beta", format!("{coef} is not strictly positive")));
        }
        if !(n.is_finite() && n >= 1.0) {
            return Err(domain("beta exponent", format!("n = {n} must be at least 1")));
        }
        Ok(Self { coef, n })
    }

    pub fn is_constant(&self) -> bool {
        self.n == 1.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.n == 1.0 {
            self.coef
        } else {
            self.coef * x.powf(self.n - 1.0)
        }
    }

    /// `int_0^x beta = coef x^n / n`.
    pub fn integral(&self, x: f64) -> f64 {
        self.coef * x.powf(self.n) / self.n
    }
}

impl fmt::Display for DivisionRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1.0 {
            write!(f, "{}", self.coef)
        } else {
            write!(f, "{}*x^{}", self.coef, self.n - 1.0)
        }
    }
}

/// Tabulated per-type densities `N_i(x_j)` with unit total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeProfile {
    grid: SizeGrid,
    values: Vec<Vec<f64>>,
    mass: f64,
    tolerance: f64,
}

impl SizeProfile {
    /// Accepts values whose trapezoid mass is within `tolerance` of one.
    pub fn new(grid: SizeGrid, values: Vec<Vec<f64>>, tolerance: f64) -> Result<Self> {
        let values = check_values(&grid, values)?;
        let mass = total_mass(&grid, &values);
        if (mass - 1.0).abs() > tolerance {
            return Err(Error::Inconsistency(format!(
                "profile mass {mass} differs from 1 by more than {tolerance:e}"
            )));
        }
        Ok(Self {
            grid,
            values,
            mass,
            tolerance,
        })
    }

    /// Rescales to unit trapezoid mass.
    pub fn normalized(grid: SizeGrid, values: Vec<Vec<f64>>) -> Result<Self> {
        let mut values = check_values(&grid, values)?;
        let mass = total_mass(&grid, &values);
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Inconsistency(format!("profile mass {mass} cannot be normalized")));
        }
        for row in &mut values {
            for x in row.iter_mut() {
                *x /= mass;
            }
        }
        let mass = total_mass(&grid, &values);
        Ok(Self {
            grid,
            values,
            mass,
            tolerance: 1e-12,
        })
    }

    pub fn grid(&self) -> &SizeGrid {
        &self.grid
    }

    pub fn types(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn type_values(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    /// Total trapezoid mass.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Per-type trapezoid masses.
    pub fn masses(&self) -> Vec<f64> {
        self.values.iter().map(|v| self.grid.integrate(v)).collect()
    }

    /// Pointwise sum over types.
    pub fn total(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|j| self.values.iter().map(|v| v[j]).sum())
            .collect()
    }

    /// `sum_i int |N_i - M_i|` by trapezoid.
    pub fn l1_distance(&self, other: &SizeProfile) -> Result<f64> {
        if self.grid != other.grid || self.types() != other.types() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len() * self.types(),
                found: other.grid.len() * other.types(),
            });
        }
        let w = self.grid.weights();
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .zip(&w)
                    .map(|((p, q), w)| w * (p - q).abs())
                    .sum::<f64>()
            })
            .sum())
    }

    /// Columns `x, N_1 .. N_M`; every `stride`-th node.
    pub fn to_table(&self, stride: usize) -> CsvTable {
        let mut cols = vec!["x".to_string()];
        cols.extend((1..=self.types()).map(|i| format!("N_{i}")));
        let mut t = CsvTable::new(&cols);
        t.meta("normalization_tolerance", crate::csv::fmt_f64(self.tolerance));
        for j in (0..self.grid.len()).step_by(stride.max(1)) {
            let mut row = vec![Cell::from(self.grid.nodes()[j])];
            row.extend(self.values.iter().map(|v| Cell::from(v[j])));
            t.push(row);
        }
        t
    }
}

fn check_values(grid: &SizeGrid, mut values: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    if values.is_empty() {
        return Err(domain("profile", "no types"));
    }
    let peak = values
        .iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    for row in &mut values {
        if row.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: row.len(),
            });
        }
        for x in row.iter_mut() {
            if !x.is_finite() || *x < -1e-12 * peak {
                return Err(Error::Inconsistency(format!("profile value {x} is negative")));
            }
            // Rounding noise around a true zero.
            *x = x.max(0.0);
        }
    }
    Ok(values)
}

fn total_mass(grid: &SizeGrid, values: &[Vec<f64>]) -> f64 {
    values.iter().map(|v| grid.integrate(v)).sum()
}

/// `alpha_n = 2^n / prod_{k=1..n} (2^k - 1)` until the term drops below `1e-15`.
pub fn mitosis_series_coefficients() -> Vec<f64> {
    let mut alphas = vec![1.0];
    let mut n = 1;
    loop {
        let next = alphas[n - 1] * 2.0 / (2f64.powi(n as i32) - 1.0);
        if next < 1e-15 {
            break;
        }
        alphas.push(next);
        n += 1;
    }
    alphas
}

/// Homogeneous equal-mitosis profile with constant growth and division rate:
/// `N(x) = C sum_n (-1)^n alpha_n exp(-2^(n+1) beta x)`.
pub fn profile_mitosis_series(beta: f64, grid: &SizeGrid) -> Result<SizeProfile> {
    positive_beta(beta)?;
    let alphas = mitosis_series_coefficients();
    let values: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| {
            alphas
                .iter()
                .enumerate()
                .map(|(n, a)| {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sign * a * (-(2f64.powi(n as i32 + 1)) * beta * x).exp()
                })
                .sum::<f64>()
        })
        .collect();
    SizeProfile::normalized(grid.clone(), vec![values])
}

/// Homogeneous uniform-fragmentation profile `4 beta^2 x exp(-2 beta x)`.
///
/// Values are exact; the declared tolerance covers the trapezoid error and
/// the tail beyond `x_max`.
pub fn profile_uniform_division(beta: f64, grid: &SizeGrid) -> Result<SizeProfile> {
    positive_beta(beta)?;
    let values: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| 4.0 * beta * beta * x * (-2.0 * beta * x).exp())
        .collect();
    let h = grid.max_spacing();
    let xm = grid.x_max();
    let tail = (1.0 + 2.0 * beta * xm) * (-2.0 * beta * xm).exp();
    let tolerance = (beta * h).powi(2) + tail + 1e-12;
    SizeProfile::new(grid.clone(), vec![values], tolerance)
}

fn positive_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(domain("beta", format!("{beta} is not strictly positive")))
    }
}

/// Unnormalized `exp(-int_0^x beta)` after checking the tail beyond `x_max`.
fn linear_growth_shape(beta_fn: &DivisionRate, grid: &SizeGrid) -> Result<Vec<f64>> {
    let shape: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| (-beta_fn.integral(x)).exp())
        .collect();
    let xm = grid.x_max();
    // beta is nondecreasing, so the tail is bounded by exp(-B(x_max)) / beta(x_max).
    let tail = shape[shape.len() - 1] / beta_fn.eval(xm);
    let mass = grid.integrate(&shape);
    if tail > 1e-8 * mass {
        return Err(Error::Truncation(format!(
            "tail mass beyond x_max = {xm} is about {:.2e}; increase x_max",
            tail / mass
        )));
    }
    Ok(shape)
}

/// Homogeneous linear-growth profile `C exp(-int_0^x beta)`.
pub fn profile_caseb_homogeneous(beta_fn: &DivisionRate, grid: &SizeGrid) -> Result<SizeProfile> {
    let shape = linear_growth_shape(beta_fn, grid)?;
    SizeProfile::normalized(grid.clone(), vec![shape])
}

/// Heterogeneous linear-growth profiles `N_i = Nbar_i * shape`, with `Nbar`
/// from the reduced matrix system.
pub fn profiles_caseb_heterogeneous(
    traits: &TraitSet,
    kernel: &HeredityKernel,
    beta_fn: &DivisionRate,
    grid: &SizeGrid,
) -> Result<(SizeProfile, EigenTriplet)> {
    let triplet = dominant_eigentriplet(&build_growth_matrix_case_b(traits, kernel)?)?;
    let shape = linear_growth_shape(beta_fn, grid)?;
    let mass = grid.integrate(&shape);
    let values = triplet
        .fractions
        .iter()
        .map(|f| shape.iter().map(|s| f * s / mass).collect())
        .collect();
    let profile = SizeProfile::new(grid.clone(), values, 1e-10)?;
    Ok((profile, triplet))
}
