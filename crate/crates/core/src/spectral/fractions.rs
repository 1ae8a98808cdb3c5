use super::EigenTriplet;
use crate::error::{Error, Result};
use crate::model::{alpha_threshold, HeredityKernel, TraitSet};

const FIXED_POINT_TOL: f64 = 1e-9;

/// Population fractions of a computed triplet, checked against
/// `N_i = 2/(v + v_i) sum_j kappa_ji v_j N_j` and, for the α-family, uniform
/// and threshold kernels, against their explicit forms.
pub fn population_fractions(
    traits: &TraitSet,
    kernel: &HeredityKernel,
    triplet: &EigenTriplet,
) -> Result<Vec<f64>> {
    let m = traits.len();
    for found in [kernel.dim(), triplet.dim()] {
        if found != m {
            return Err(Error::DimensionMismatch { expected: m, found });
        }
    }
    let v = triplet.effective_trait;
    let tv = traits.values();
    let n = &triplet.fractions;

    let check = |what: &str, expected: &dyn Fn(usize) -> f64| -> Result<()> {
        for i in 0..m {
            let e = expected(i);
            if (n[i] - e).abs() > FIXED_POINT_TOL {
                return Err(Error::Inconsistency(format!(
                    "{what}: fraction {i} is {} but {e} is expected",
                    n[i]
                )));
            }
        }
        Ok(())
    };

    check("fixed point", &|i| {
        let inflow: f64 = (0..m).map(|j| kernel.get(j, i) * tv[j] * n[j]).sum();
        2.0 * inflow / (v + tv[i])
    })?;

    if let Some(alpha) = kernel.alpha_parameter() {
        let mf = m as f64;
        check("alpha family", &|i| {
            (1.0 - alpha) / mf * v / ((mf - 1.0) / (2.0 * mf) * v + ((mf + 1.0) / (2.0 * mf) - alpha) * tv[i])
        })?;
        if (alpha - 1.0 / mf).abs() <= 4.0 * f64::EPSILON {
            check("uniform kernel", &|i| 2.0 / mf * v / (v + tv[i]))?;
        }
        if (alpha - alpha_threshold(m)).abs() <= 4.0 * f64::EPSILON {
            check("threshold kernel", &|_| 1.0 / mf)?;
        }
    }
    Ok(n.clone())
}
