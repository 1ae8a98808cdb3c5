//! Parsing for ad-hoc `solve` queries and kernel descriptors.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{
    alpha_threshold, kernel_from_toml, make_kernel_alpha, make_kernel_bimodal, make_kernel_noheredity,
    make_kernel_random, parse_number_list, HeredityKernel, TraitSet,
};
use crate::profiles::DivisionRate;
use crate::spectral::{build_growth_matrix, build_growth_matrix_case_b, dominant_eigentriplet, EigenTriplet, GrowthCase};

/// Strictly increasing comma-separated traits.
pub fn parse_traits(text: &str) -> Result<TraitSet> {
    TraitSet::new(parse_number_list(text)?)
}

/// Builds an `m x m` kernel from a descriptor:
///
/// | descriptor | kernel |
/// |---|---|
/// | `uniform` | every entry `1/m` |
/// | `alpha:A` | diagonal `A`, off-diagonal `(1-A)/(m-1)` |
/// | `alpha0` | `alpha:(1/2 + 1/(2m))` |
/// | `bimodal:K1,K2` | two traits, switching probabilities `K1`, `K2` |
/// | `noheredity:W1,..,Wm` | every row equal to `W` |
/// | `random` / `random:SEED` | seeded uniform entries, rows normalized |
/// | `matrix:R1;R2;..` | explicit rows, entries comma-separated |
/// | `file:PATH` | `dimension`/`entries` key–value file |
///
/// `seed` is used by a bare `random`.
pub fn parse_kernel(spec: &str, m: usize, seed: u64) -> Result<HeredityKernel> {
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (spec.trim(), None),
    };
    let kernel = match (head, arg) {
        ("uniform", None) => make_kernel_noheredity(&vec![1.0 / m as f64; m])?,
        ("alpha0", None) => make_kernel_alpha(m, alpha_threshold(m))?,
        ("alpha", Some(a)) => make_kernel_alpha(m, number(a)?)?,
        ("bimodal", Some(a)) => match parse_number_list(a)?.as_slice() {
            [k1, k2] => make_kernel_bimodal(*k1, *k2)?,
            _ => return Err(Error::Config(format!("`{spec}`: bimodal takes two probabilities"))),
        },
        ("noheredity", Some(a)) => make_kernel_noheredity(&parse_number_list(a)?)?,
        ("random", None) => make_kernel_random(m, seed)?,
        ("random", Some(s)) => make_kernel_random(
            m,
            s.parse()
                .map_err(|_| Error::Config(format!("`{s}` is not an unsigned seed")))?,
        )?,
        ("matrix", Some(a)) => {
            let rows: Vec<Vec<f64>> = a.split(';').map(parse_number_list).collect::<Result<_>>()?;
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::Config(format!("`{spec}`: matrix rows must have {n} entries")));
            }
            HeredityKernel::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))?
        }
        ("file", Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read kernel file {path}: {e}")))?;
            kernel_from_toml(&text)?
        }
        _ => return Err(Error::Config(format!("unrecognized kernel descriptor `{spec}`"))),
    };
    if kernel.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: kernel.dim(),
        });
    }
    Ok(kernel)
}

fn number(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Config(format!("`{s}` is not a number")))
}

/// Division rate given on the command line: a constant or `pow:N` for `x^(N-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaSpec {
    Constant(f64),
    Power(f64),
}

impl BetaSpec {
    pub fn rate(self) -> Result<DivisionRate> {
        match self {
            BetaSpec::Constant(b) => DivisionRate::constant(b),
            BetaSpec::Power(n) => DivisionRate::power(1.0, n),
        }
    }
}

pub fn parse_beta(text: &str) -> Result<BetaSpec> {
    match text.strip_prefix("pow:") {
        Some(n) => Ok(BetaSpec::Power(number(n)?)),
        None => Ok(BetaSpec::Constant(number(text)?)),
    }
}

/// Eigentriplet of the reduced problem. Case A needs a constant rate; in
/// case B the rate does not enter the eigenvalue and is only validated.
pub fn solve_query(case: GrowthCase, traits: &TraitSet, kernel: &HeredityKernel, beta: BetaSpec) -> Result<EigenTriplet> {
    beta.rate()?;
    match (case, beta) {
        (GrowthCase::A, BetaSpec::Constant(b)) => dominant_eigentriplet(&build_growth_matrix(traits, kernel, b)?),
        (GrowthCase::A, BetaSpec::Power(_)) => Err(Error::Config(
            "case A requires a constant division rate".into(),
        )),
        (GrowthCase::B, _) => dominant_eigentriplet(&build_growth_matrix_case_b(traits, kernel)?),
    }
}
