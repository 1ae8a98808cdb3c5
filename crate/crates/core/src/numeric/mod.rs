//! Discretized eigenproblem for the full heterogeneous growth-fragmentation
//! operator, for cases without a closed form.

mod operator;
mod solver;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use operator::DiscreteOperator;
pub use solver::{
    solve_eigen, solve_eigen_renewal, solve_heterogeneous, AdjointProfile, NumericEigen, SolveMethod,
    SolverOptions,
};

use crate::error::{domain, Error, Result};
use crate::model::{HeredityKernel, TraitSet};
use crate::profiles::DivisionRate;

/// Growth shape `tau(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Growth {
    /// `tau = 1`
    Constant,
    /// `tau = x`
    Linear,
}

impl Growth {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Growth::Constant => 1.0,
            Growth::Linear => x,
        }
    }
}

/// Fragmentation kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fragmentation {
    /// Two daughters of exactly half the mother's size.
    Mitosis,
    /// Daughter size uniform on `[0, y]`.
    Uniform,
}

impl fmt::Display for Fragmentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragmentation::Mitosis => "mitosis",
            Fragmentation::Uniform => "uniform",
        })
    }
}

impl FromStr for Fragmentation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mitosis" => Ok(Fragmentation::Mitosis),
            "uniform" => Ok(Fragmentation::Uniform),
            other => Err(domain("frag", format!("`{other}` is not mitosis or uniform"))),
        }
    }
}

/// Which closed-form setting a model falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    A,
    B,
    Custom,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::A => "A",
            CaseTag::B => "B",
            CaseTag::Custom => "custom",
        })
    }
}

/// A heterogeneous growth-fragmentation model: growth law, division rate, fragmentation, traits and kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub growth: Growth,
    pub division: DivisionRate,
    pub frag: Fragmentation,
    pub traits: TraitSet,
    pub kernel: HeredityKernel,
}

impl ModelSpec {
    pub fn new(
        growth: Growth,
        division: DivisionRate,
        frag: Fragmentation,
        traits: TraitSet,
        kernel: HeredityKernel,
    ) -> Result<Self> {
        if kernel.dim() != traits.len() {
            return Err(Error::DimensionMismatch {
                expected: traits.len(),
                found: kernel.dim(),
            });
        }
        Ok(Self {
            growth,
            division,
            frag,
            traits,
            kernel,
        })
    }

    /// Constant growth and constant division rate `beta`.
    pub fn case_a(traits: TraitSet, kernel: HeredityKernel, beta: f64, frag: Fragmentation) -> Result<Self> {
        Self::new(Growth::Constant, DivisionRate::constant(beta)?, frag, traits, kernel)
    }

    /// Linear growth with uniform fragmentation.
    pub fn case_b(traits: TraitSet, kernel: HeredityKernel, division: DivisionRate) -> Result<Self> {
        Self::new(Growth::Linear, division, Fragmentation::Uniform, traits, kernel)
    }

    pub fn case_tag(&self) -> CaseTag {
        match (self.growth, self.frag) {
            (Growth::Constant, _) if self.division.is_constant() => CaseTag::A,
            (Growth::Linear, Fragmentation::Uniform) => CaseTag::B,
            _ => CaseTag::Custom,
        }
    }

    /// Effective trait from the Malthus parameter where growth rates scale it
    /// linearly: `lambda / beta` for constant growth and rate, `lambda` for
    /// linear growth. Other settings have no such scaling.
    pub fn effective_trait(&self, lambda: f64) -> Option<f64> {
        match self.growth {
            Growth::Constant if self.division.is_constant() => Some(lambda / self.division.coef),
            Growth::Linear => Some(lambda),
            Growth::Constant => None,
        }
    }
}
