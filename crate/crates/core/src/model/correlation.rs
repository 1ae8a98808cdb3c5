use serde::{Deserialize, Serialize};

use super::traits::TraitSet;
use crate::error::{domain, Error, Result};

/// Pearson correlation between mother and daughter traits under an α-family kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub gamma: f64,
    pub alpha: f64,
    pub m: usize,
    pub mother_law: Vec<f64>,
}

/// Closed-form correlation of `(V_m, V_d)` where `V_m` follows `mother_law`
/// and, with probability `alpha`, `V_d = V_m`; otherwise `V_d` is uniform over
/// the remaining traits.
///
/// With `R = 1/(M-1)`, `U` uniform on the traits and `W` the "other trait" draw:
/// `E[W^k] = R (M E[U^k] - E[V_m^k])`, `Cov = (αM - 1) R Var(V_m)` and
/// `Var(V_d) = α Var(V_m) + (1-α) Var(W) + α(1-α) Δ²` with `Δ = E[W] - E[V_m]`.
pub fn pearson_correlation_alpha(
    m: usize,
    alpha: f64,
    mother_law: &[f64],
    traits: &TraitSet,
) -> Result<CorrelationReport> {
    if m < 2 {
        return Err(domain("M", format!("{m} < 2")));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(domain("alpha", format!("{alpha} is not in [0, 1)")));
    }
    for found in [mother_law.len(), traits.len()] {
        if found != m {
            return Err(Error::DimensionMismatch { expected: m, found });
        }
    }
    if mother_law.iter().any(|p| !(p.is_finite() && *p >= 0.0))
        || (mother_law.iter().sum::<f64>() - 1.0).abs() > 1e-12
    {
        return Err(domain("mother_law", "not a probability vector"));
    }

    let v = traits.values();
    let r = 1.0 / (m - 1) as f64;
    let moment = |k: i32| -> f64 { mother_law.iter().zip(v).map(|(p, x)| p * x.powi(k)).sum() };
    let uniform = |k: i32| -> f64 { v.iter().map(|x| x.powi(k)).sum::<f64>() / m as f64 };

    let (ev, ev2) = (moment(1), moment(2));
    let var_m = ev2 - ev * ev;
    if mother_law.iter().filter(|p| **p > 0.0).count() < 2 || var_m <= 0.0 {
        return Err(Error::UndefinedCorrelation(
            "mother law is concentrated on a single trait".into(),
        ));
    }
    let ew = r * (m as f64 * uniform(1) - ev);
    let ew2 = r * (m as f64 * uniform(2) - ev2);
    let var_w = ew2 - ew * ew;
    let delta = ew - ev;

    let cov = (alpha * m as f64 - 1.0) * r * var_m;
    let var_d = alpha * var_m + (1.0 - alpha) * var_w + alpha * (1.0 - alpha) * delta * delta;
    let gamma = (cov / (var_d * var_m).sqrt()).clamp(-1.0, 1.0);
    Ok(CorrelationReport {
        gamma,
        alpha,
        m,
        mother_law: mother_law.to_vec(),
    })
}
