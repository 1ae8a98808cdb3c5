use crate::error::{domain, Result};

fn check_probability(name: &'static str, k: f64) -> Result<()> {
    if k > 0.0 && k < 1.0 {
        Ok(())
    } else {
        Err(domain(name, format!("{k} is not in the open interval (0, 1)")))
    }
}

fn check_trait(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(name, format!("{v} is not strictly positive")))
    }
}

/// Closed-form effective trait of two traits with switching probabilities
/// `k1` (from `v1`) and `k2` (from `v2`):
///
/// `v = a + b + sqrt((a - b)^2 + 4 k1 k2 v1 v2)` with `a = (1/2 - k1) v1`,
/// `b = (1/2 - k2) v2`.
///
/// Unordered traits are swapped together with their probabilities.
pub fn effective_trait_bimodal(v1: f64, v2: f64, k1: f64, k2: f64) -> Result<f64> {
    check_trait("v1", v1)?;
    check_trait("v2", v2)?;
    check_probability("k1", k1)?;
    check_probability("k2", k2)?;
    let (v1, v2, k1, k2) = if v1 <= v2 { (v1, v2, k1, k2) } else { (v2, v1, k2, k1) };
    let a = (0.5 - k1) * v1;
    let b = (0.5 - k2) * v2;
    let d = a - b;
    Ok(a + b + (d * d + 4.0 * k1 * k2 * v1 * v2).sqrt())
}

/// Limit of [`effective_trait_bimodal`] as `k1 -> 0`: `max(v1, (1 - 2 k2) v2)`.
pub fn bimodal_limit_k1_to_zero(v1: f64, v2: f64, k2: f64) -> Result<f64> {
    check_trait("v1", v1)?;
    check_trait("v2", v2)?;
    check_probability("k2", k2)?;
    if v1 >= v2 {
        return Err(domain("v1", format!("{v1} must be below v2 = {v2}")));
    }
    Ok(v1.max((1.0 - 2.0 * k2) * v2))
}
