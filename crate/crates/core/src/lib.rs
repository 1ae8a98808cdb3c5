//! Effective growth rate of heterogeneous size-structured populations.
//!
//! A population of cells grows in size and divides by fragmentation. Each cell
//! carries a growth-rate multiplier (its trait) chosen from a finite set and
//! passed from mother to daughters through a stochastic heredity kernel. The
//! crate computes the Malthus parameter of such a population, the single
//! "effective" trait whose homogeneous population grows equally fast, the
//! steady size profiles, and the time-dependent dynamics.
//!
//! * [`model`]: traits, heredity kernels, means, trait sweeps, correlation.
//! * [`spectral`]: matrix eigenproblem, bimodal closed form, no-heredity polynomial.
//! * [`profiles`]: analytic steady size distributions.
//! * [`numeric`]: discretized growth-fragmentation eigensolver.
//! * [`dynamics`]: explicit time stepping and convergence diagnostics.
//! * [`experiments`]: sweep runners writing CSV datasets and a manifest.

pub mod csv;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod model;
pub mod numeric;
pub mod profiles;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{HeredityKernel, MeanKind, TraitSet};
pub use profiles::{SizeGrid, SizeProfile};
pub use spectral::{EigenTriplet, GrowthCase};
