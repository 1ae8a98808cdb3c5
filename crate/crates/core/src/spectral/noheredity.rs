use super::{EigenTriplet, GrowthCase};
use crate::error::{domain, Error, Result};
use crate::model::{make_kernel_noheredity, TraitSet};

/// `P(u) = prod_k (u + v_k) - 2u sum_j w_j prod_{k != j} (u + v_k)`.
///
/// Its unique positive root is the effective trait when every daughter draws
/// her trait from the weights `w` independently of the mother.
#[derive(Debug, Clone, PartialEq)]
pub struct NoHeredityPolynomial {
    /// Index `n` holds the coefficient of `u^n`.
    pub coefficients: Vec<f64>,
    /// Elementary symmetric polynomials `S_0 .. S_M` of the traits.
    pub elementary_symmetric: Vec<f64>,
}

/// Coefficients of `prod (u + v_k)` by incremental expansion, lowest degree
/// first. Entry `n` is the elementary symmetric polynomial `S_{M-n}`.
fn expand(roots: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut c = vec![1.0];
    for v in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (n, cn) in c.iter().enumerate() {
            next[n] += v * cn;
            next[n + 1] += cn;
        }
        c = next;
    }
    c
}

impl NoHeredityPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, u: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }
}

pub fn noheredity_polynomial(traits: &TraitSet, weights: &[f64]) -> Result<NoHeredityPolynomial> {
    make_kernel_noheredity(weights)?;
    let m = traits.len();
    if weights.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: weights.len(),
        });
    }
    let v = traits.values();
    let full = expand(v.iter().copied());
    let mut coefficients = full.clone();
    for (j, w) in weights.iter().enumerate() {
        let partial = expand(v.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| *x));
        // u * prod_{k != j}: shift degrees up by one.
        for (n, c) in partial.iter().enumerate() {
            coefficients[n + 1] -= 2.0 * w * c;
        }
    }
    let elementary_symmetric = full.iter().rev().copied().collect();
    Ok(NoHeredityPolynomial {
        coefficients,
        elementary_symmetric,
    })
}

/// Root of the no-heredity polynomial by bisection on `[v_1, v_M]`, with
/// `beta = 1`.
pub fn solve_noheredity(traits: &TraitSet, weights: &[f64]) -> Result<EigenTriplet> {
    solve_noheredity_with_beta(traits, weights, 1.0)
}

pub fn solve_noheredity_with_beta(traits: &TraitSet, weights: &[f64], beta: f64) -> Result<EigenTriplet> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(domain("beta", format!("{beta} is not strictly positive")));
    }
    let poly = noheredity_polynomial(traits, weights)?;
    let (mut lo, mut hi) = (traits.min(), traits.max());
    let v = if traits.len() == 1 {
        lo
    } else {
        let (p_lo, p_hi) = (poly.eval(lo), poly.eval(hi));
        if !(p_lo > 0.0 && p_hi < 0.0) {
            return Err(Error::Inconsistency(format!(
                "polynomial does not change sign on [{lo}, {hi}]: P = {p_lo:e}, {p_hi:e}"
            )));
        }
        let tol = 1e-13 * hi;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if poly.eval(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let tv = traits.values();
    let fractions: Vec<f64> = tv
        .iter()
        .zip(weights)
        .map(|(vi, w)| 2.0 * v * w / (v + vi))
        .collect();
    let raw: Vec<f64> = tv.iter().map(|vi| vi / (vi + v)).collect();
    let pairing: f64 = raw.iter().zip(&fractions).map(|(p, n)| p * n).sum();
    Ok(EigenTriplet {
        case: GrowthCase::A,
        beta,
        lambda: beta * v,
        fractions,
        adjoint: raw.iter().map(|p| p / pairing).collect(),
        effective_trait: v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traits(v: &[f64]) -> TraitSet {
        TraitSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_trait() {
        let p = noheredity_polynomial(&traits(&[3.0]), &[1.0]).unwrap();
        assert_eq!(p.coefficients, vec![3.0, -1.0]);
        let t = solve_noheredity(&traits(&[3.0]), &[1.0]).unwrap();
        assert_eq!(t.effective_trait, 3.0);
        assert_eq!(t.fractions, vec![1.0]);
    }

    #[test]
    fn leading_and_constant_terms() {
        let t = traits(&[0.3, 1.1, 2.0, 5.5]);
        let p = noheredity_polynomial(&t, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(p.degree(), 4);
        assert!((p.coefficients[4] + 1.0).abs() < 1e-15);
        let prod: f64 = t.values().iter().product();
        assert!((p.coefficients[0] - prod).abs() < 1e-14);
        assert_eq!(p.elementary_symmetric[0], 1.0);
        assert!((p.elementary_symmetric[4] - prod).abs() < 1e-14);
    }

    #[test]
    fn two_traits_geometric_mean() {
        let t = solve_noheredity(&traits(&[0.5, 2.5]), &[0.5, 0.5]).unwrap();
        let g = 1.25f64.sqrt();
        assert!((t.effective_trait - g).abs() < 1e-12);
        assert!((t.fractions[0] - 0.690983005625).abs() < 1e-10);
        assert!((t.fractions.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let mean: f64 = t.fractions[0] * 0.5 + t.fractions[1] * 2.5;
        assert!((mean - g).abs() < 1e-10);
    }
}
