//! Experiment runners that regenerate every figure dataset as CSV.
//!
//! Each run takes an [`ExperimentConfig`], writes one or more CSV files into
//! the output directory and a `manifest_<id>.json` listing the configuration
//! hash, the seed, every effective parameter, the produced files and the
//! outcome of the built-in sanity checks.

mod config;
mod manifest;
mod mitosis;
mod query;
mod surfaces;
mod sweeps;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, Params, DEFAULT_SEED};
pub use manifest::{Check, FileEntry, Manifest};
pub use query::{parse_beta, parse_kernel, parse_traits, solve_query, BetaSpec};

use crate::csv::CsvTable;
use crate::error::{Error, Result};
use crate::model::{make_kernel_noheredity, HeredityKernel, TraitSet};
use crate::spectral::{build_growth_matrix, dominant_eigentriplet, EigenTriplet};

/// Identifier of a reproducible dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExperimentId {
    Fig2,
    Fig3,
    Fig4,
    Fig5Heatmap,
    Fig5Surfaces,
    Fig6MConvergence,
    Fig7SigmaAlpha,
    Fig8Neutrality,
    FigS1Fractions,
    FigS2Mitosis,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 10] = [
        ExperimentId::Fig2,
        ExperimentId::Fig3,
        ExperimentId::Fig4,
        ExperimentId::Fig5Heatmap,
        ExperimentId::Fig5Surfaces,
        ExperimentId::Fig6MConvergence,
        ExperimentId::Fig7SigmaAlpha,
        ExperimentId::Fig8Neutrality,
        ExperimentId::FigS1Fractions,
        ExperimentId::FigS2Mitosis,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Fig2 => "fig2",
            ExperimentId::Fig3 => "fig3",
            ExperimentId::Fig4 => "fig4",
            ExperimentId::Fig5Heatmap => "fig5_heatmap",
            ExperimentId::Fig5Surfaces => "fig5_surfaces",
            ExperimentId::Fig6MConvergence => "fig6_Mconvergence",
            ExperimentId::Fig7SigmaAlpha => "fig7_sigma_alpha",
            ExperimentId::Fig8Neutrality => "fig8_neutrality",
            ExperimentId::FigS1Fractions => "figS1_fractions",
            ExperimentId::FigS2Mitosis => "figS2_mitosis",
        }
    }

    /// Whether the run discretizes the size variable (and so reads `dx`,
    /// `xmax` and `tol`).
    pub fn uses_grid(self) -> bool {
        matches!(
            self,
            ExperimentId::Fig2 | ExperimentId::Fig5Surfaces | ExperimentId::FigS1Fractions | ExperimentId::FigS2Mitosis
        )
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Self::ALL.iter().map(|id| id.as_str()).collect();
                Error::Config(format!("unknown experiment `{s}`; expected one of {}", known.join(", ")))
            })
    }
}

/// Tables and checks produced by one runner.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub tables: Vec<(String, CsvTable)>,
    pub checks: Vec<Check>,
}

impl RunOutput {
    fn table(&mut self, name: &str, table: CsvTable) {
        self.tables.push((name.to_string(), table));
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }
}

/// Runs one experiment, writes its files and manifest, and returns the
/// manifest. A failed built-in check is reported as [`Error::CheckFailed`]
/// after everything has been written.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Manifest> {
    let mut params = config.params();
    let run = |params: &mut Params| -> Result<RunOutput> {
        match config.id {
            ExperimentId::Fig2 => surfaces::run_fig2(params),
            ExperimentId::Fig3 => sweeps::run_fig3(params),
            ExperimentId::Fig4 => sweeps::run_fig4(params),
            ExperimentId::Fig5Heatmap => sweeps::run_fig5_heatmap(params),
            ExperimentId::Fig5Surfaces => surfaces::run_fig5_surfaces(params),
            ExperimentId::Fig6MConvergence => sweeps::run_fig6(params, config.seed),
            ExperimentId::Fig7SigmaAlpha => sweeps::run_fig7(params),
            ExperimentId::Fig8Neutrality => sweeps::run_fig8(params, config.seed),
            ExperimentId::FigS1Fractions => surfaces::run_figs1(params),
            ExperimentId::FigS2Mitosis => mitosis::run_figs2(params),
        }
    };
    let output = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| run(&mut params))?,
        None => run(&mut params)?,
    };
    let parameters = params.finish()?;
    let manifest = manifest::write_all(config, parameters, output)?;
    if let Some(failed) = manifest.checks.iter().find(|c| !c.passed) {
        return Err(Error::CheckFailed {
            name: failed.name.clone(),
            detail: failed.detail.clone(),
        });
    }
    Ok(manifest)
}

/// Case A eigentriplet with `beta = 1`; a single trait is its own effective trait.
fn case_a_triplet(traits: &TraitSet, kernel: impl FnOnce(usize) -> Result<HeredityKernel>) -> Result<EigenTriplet> {
    let m = traits.len();
    let kernel = if m == 1 { make_kernel_noheredity(&[1.0])? } else { kernel(m)? };
    dominant_eigentriplet(&build_growth_matrix(traits, &kernel, 1.0)?)
}

/// `n` equally spaced values from `a` to `b` inclusive.
fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}
