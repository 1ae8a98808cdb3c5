//! Traits, heredity kernels, means and the mother–daughter correlation.

mod correlation;
mod format;
mod kernel;
mod traits;

pub use correlation::{pearson_correlation_alpha, CorrelationReport};
pub use format::{
    kernel_from_toml, kernel_to_toml, parse_number_list, traits_from_toml, traits_to_toml,
};
pub use kernel::{
    alpha_threshold, make_kernel_alpha, make_kernel_bimodal, make_kernel_noheredity,
    make_kernel_random, validate_kernel, HeredityKernel, KernelReport, ROW_SUM_TOL,
};
pub use traits::{make_trait_set, mean, sigma_limit, MeanKind, TraitSet, TraitSweep};
