//! Malthus parameter, effective trait, population fractions and adjoint
//! weights for the constant-adjoint cases, where the problem reduces to an
//! `M x M` eigenproblem.

mod bimodal;
mod fractions;
mod matrix;
mod noheredity;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bimodal::{bimodal_limit_k1_to_zero, effective_trait_bimodal};
pub use fractions::population_fractions;
pub use matrix::{
    build_growth_matrix, build_growth_matrix_case_b, dominant_eigentriplet, perron_pair,
    GrowthMatrix, PerronPair, PowerOptions,
};
pub use noheredity::{noheredity_polynomial, solve_noheredity, solve_noheredity_with_beta, NoHeredityPolynomial};

use crate::csv::{Cell, CsvTable};
use crate::model::TraitSet;

/// Constant growth with constant division rate (A) or linear growth with
/// uniform fragmentation (B).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GrowthCase {
    A,
    B,
}

impl fmt::Display for GrowthCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GrowthCase::A => "A",
            GrowthCase::B => "B",
        })
    }
}

impl FromStr for GrowthCase {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "A" | "a" => Ok(GrowthCase::A),
            "B" | "b" => Ok(GrowthCase::B),
            other => Err(crate::error::domain("case", format!("`{other}` is not A or B"))),
        }
    }
}

/// Dominant eigenvalue with its normalized right and left vectors.
///
/// `fractions` sum to one and `fractions · adjoint = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenTriplet {
    pub case: GrowthCase,
    pub beta: f64,
    pub lambda: f64,
    pub fractions: Vec<f64>,
    pub adjoint: Vec<f64>,
    pub effective_trait: f64,
}

impl EigenTriplet {
    pub fn dim(&self) -> usize {
        self.fractions.len()
    }

    /// Header matching [`EigenTriplet::csv_row`] for `m` traits.
    pub fn csv_columns(m: usize) -> Vec<String> {
        let mut cols: Vec<String> = ["M", "beta", "case", "lambda", "v_eff"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        cols.extend((1..=m).map(|i| format!("N_{i}")));
        cols.extend((1..=m).map(|i| format!("phi_{i}")));
        cols
    }

    pub fn csv_row(&self) -> Vec<Cell> {
        let mut row = vec![
            Cell::from(self.dim()),
            self.beta.into(),
            self.case.to_string().into(),
            self.lambda.into(),
            self.effective_trait.into(),
        ];
        row.extend(self.fractions.iter().map(|x| Cell::from(*x)));
        row.extend(self.adjoint.iter().map(|x| Cell::from(*x)));
        row
    }

    /// Single-row table with the triplet.
    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(&Self::csv_columns(self.dim()));
        t.push(self.csv_row());
        t
    }

    /// `beta * sum_i v_i N_i`, which must equal `lambda`.
    pub fn weighted_rate(&self, traits: &TraitSet) -> f64 {
        self.beta
            * traits
                .values()
                .iter()
                .zip(&self.fractions)
                .map(|(v, n)| v * n)
                .sum::<f64>()
    }
}

/// Effective trait of a triplet: `lambda / beta` in case A, `lambda` in case B.
pub fn effective_trait(triplet: &EigenTriplet, case: GrowthCase) -> f64 {
    match case {
        GrowthCase::A => triplet.lambda / triplet.beta,
        GrowthCase::B => triplet.lambda,
    }
}
