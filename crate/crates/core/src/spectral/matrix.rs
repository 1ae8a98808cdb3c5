use nalgebra::{DMatrix, DVector};

use super::{EigenTriplet, GrowthCase};
use crate::error::{domain, Error, Result};
use crate::model::{HeredityKernel, TraitSet};

/// `A = beta (-Id + 2 kappa^T) Diag(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthMatrix {
    entries: DMatrix<f64>,
    beta: f64,
    case: GrowthCase,
    traits: TraitSet,
    kernel: HeredityKernel,
}

impl GrowthMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn case(&self) -> GrowthCase {
        self.case
    }

    pub fn traits(&self) -> &TraitSet {
        &self.traits
    }

    pub fn kernel(&self) -> &HeredityKernel {
        &self.kernel
    }

    /// The diagonal shift `2 beta v_M` that makes the matrix nonnegative.
    pub fn shift(&self) -> f64 {
        2.0 * self.beta * self.traits.max()
    }

    /// `A + 2 beta v_M Id`.
    pub fn shifted(&self) -> DMatrix<f64> {
        let mut s = self.entries.clone();
        let c = self.shift();
        for i in 0..s.nrows() {
            s[(i, i)] += c;
        }
        s
    }
}

/// Entry `(i, j)` is `beta (2 kappa_ji - delta_ij) v_j`.
pub fn build_growth_matrix(
    traits: &TraitSet,
    kernel: &HeredityKernel,
    beta: f64,
) -> Result<GrowthMatrix> {
    build(traits, kernel, beta, GrowthCase::A)
}

/// The reduced linear-growth system: same matrix with `beta = 1`.
pub fn build_growth_matrix_case_b(traits: &TraitSet, kernel: &HeredityKernel) -> Result<GrowthMatrix> {
    build(traits, kernel, 1.0, GrowthCase::B)
}

fn build(traits: &TraitSet, kernel: &HeredityKernel, beta: f64, case: GrowthCase) -> Result<GrowthMatrix> {
    let m = traits.len();
    if kernel.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: kernel.dim(),
        });
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(domain("beta", format!("{beta} is not strictly positive")));
    }
    let v = traits.values();
    let entries = DMatrix::from_fn(m, m, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        beta * (2.0 * kernel.get(j, i) - delta) * v[j]
    });
    Ok(GrowthMatrix {
        entries,
        beta,
        case,
        traits: traits.clone(),
        kernel: kernel.clone(),
    })
}

/// Stopping rule for the power iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOptions {
    /// Bound on the relative eigenvalue change and on the relative residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Iterations without convergence before the working matrix is squared.
    pub stall_window: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 1_000_000,
            stall_window: 500,
        }
    }
}

/// Perron root of a nonnegative irreducible matrix with both Perron vectors,
/// each scaled to unit sum.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronPair {
    pub value: f64,
    pub right: DVector<f64>,
    pub left: DVector<f64>,
    pub iterations: usize,
    pub residual: f64,
}

pub fn perron_pair(b: &DMatrix<f64>, opts: PowerOptions) -> Result<PerronPair> {
    let (value, right, it_r, res_r) = power_iteration(b, opts)?;
    let bt = b.transpose();
    let (_, left, it_l, res_l) = power_iteration(&bt, opts)?;
    Ok(PerronPair {
        value,
        right,
        left,
        iterations: it_r.max(it_l),
        residual: res_r.max(res_l),
    })
}

/// Power iteration from the all-ones vector.
///
/// Convergence is judged on `b` itself: relative change of the estimate
/// `sum(b x) / sum(x)` and relative residual `|b x - mu x|_1 / (mu |x|_1)`.
/// When a window of iterations passes without convergence the iterated matrix
/// is first replaced by `b + mu I`, which is primitive and so has no period,
/// and on later stalls by its square.
fn power_iteration(b: &DMatrix<f64>, opts: PowerOptions) -> Result<(f64, DVector<f64>, usize, f64)> {
    let n = b.nrows();
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut work: Option<DMatrix<f64>> = None;
    let mut mu_prev = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut history = Vec::new();
    let mut since_square = 0;

    for it in 1..=opts.max_iter {
        let mut y = match &work {
            Some(w) => w * &x,
            None => b * &x,
        };
        let s = y.sum();
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Inconsistency(format!(
                "power iteration produced a non-positive vector sum {s}"
            )));
        }
        y /= s;
        let z = b * &y;
        let mu = z.sum();
        residual = (&z - mu * &y).lp_norm(1) / mu.abs();
        let change = ((mu - mu_prev) / mu).abs();
        x = y;
        if change < opts.tol && residual < opts.tol {
            return Ok((mu, x, it, residual));
        }
        mu_prev = mu;
        if it % 100 == 0 {
            history.push(residual);
        }
        since_square += 1;
        if since_square >= opts.stall_window {
            let mut sq = match work.take() {
                Some(w) => &w * &w,
                None => b + DMatrix::identity(n, n) * mu.abs().max(b.max()),
            };
            let scale = sq.max();
            if scale > 0.0 && scale.is_finite() {
                sq /= scale;
            }
            work = Some(sq);
            since_square = 0;
        }
    }
    Err(Error::Convergence {
        iterations: opts.max_iter,
        residual,
        history,
    })
}

/// Dominant eigenvalue of `A` via the shifted matrix, with `N` summing to one
/// and the adjoint scaled so that `N · phi = 1`.
pub fn dominant_eigentriplet(matrix: &GrowthMatrix) -> Result<EigenTriplet> {
    dominant_eigentriplet_with(matrix, PowerOptions::default())
}

pub(crate) fn dominant_eigentriplet_with(matrix: &GrowthMatrix, opts: PowerOptions) -> Result<EigenTriplet> {
    let pair = perron_pair(&matrix.shifted(), opts)?;
    let lambda = pair.value - matrix.shift();
    if !(lambda > 0.0) {
        return Err(Error::Inconsistency(format!("non-positive Malthus parameter {lambda}")));
    }
    let fractions: Vec<f64> = pair.right.iter().copied().collect();
    let pairing: f64 = fractions.iter().zip(pair.left.iter()).map(|(n, p)| n * p).sum();
    let adjoint: Vec<f64> = pair.left.iter().map(|p| p / pairing).collect();
    let triplet = EigenTriplet {
        case: matrix.case(),
        beta: matrix.beta(),
        lambda,
        fractions,
        adjoint,
        effective_trait: lambda / matrix.beta(),
    };
    Ok(triplet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_kernel_bimodal, make_kernel_noheredity};

    fn traits(v: &[f64]) -> TraitSet {
        TraitSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn entry_formula() {
        let k = make_kernel_noheredity(&[1.0]).unwrap();
        let a = build_growth_matrix(&traits(&[3.0]), &k, 2.0).unwrap();
        assert_eq!(a.entries()[(0, 0)], 6.0);

        let k = make_kernel_bimodal(0.5, 0.5).unwrap();
        let a = build_growth_matrix(&traits(&[0.5, 2.5]), &k, 1.0).unwrap();
        assert_eq!(a.entries(), &DMatrix::from_row_slice(2, 2, &[0.0, 2.5, 0.5, 0.0]));
        assert!(a.shifted().iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn dimension_mismatch() {
        let k = make_kernel_bimodal(0.5, 0.5).unwrap();
        assert!(matches!(
            build_growth_matrix(&traits(&[1.0]), &k, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(build_growth_matrix(&traits(&[1.0, 2.0]), &k, 0.0).is_err());
    }

    #[test]
    fn homogeneous_triplet() {
        let k = make_kernel_noheredity(&[1.0]).unwrap();
        let t = dominant_eigentriplet(&build_growth_matrix(&traits(&[3.0]), &k, 2.0).unwrap()).unwrap();
        assert!((t.lambda - 6.0).abs() < 1e-12);
        assert_eq!(t.fractions, vec![1.0]);
        assert!((t.adjoint[0] - 1.0).abs() < 1e-15);
        assert!((t.effective_trait - 3.0).abs() < 1e-12);
    }

    #[test]
    fn geometric_mean_example() {
        let k = make_kernel_bimodal(0.5, 0.5).unwrap();
        let t = dominant_eigentriplet(&build_growth_matrix(&traits(&[0.5, 2.5]), &k, 1.0).unwrap()).unwrap();
        assert!((t.lambda - 1.25f64.sqrt()).abs() < 1e-10);
        assert!((t.fractions.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn periodic_matrix_needs_squaring() {
        // Eigenvalues ±√2: plain iteration oscillates forever.
        let b = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        let mut opts = PowerOptions::default();
        opts.stall_window = 10;
        opts.max_iter = 100;
        let p = perron_pair(&b, opts).unwrap();
        assert!((p.value - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cap_reports_history() {
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 1e-9, 1e-9, 1.0 - 1e-9]);
        let opts = PowerOptions {
            tol: 1e-15,
            max_iter: 300,
            stall_window: usize::MAX,
        };
        match perron_pair(&b, opts) {
            Err(Error::Convergence { iterations, history, .. }) => {
                assert_eq!(iterations, 300);
                assert_eq!(history.len(), 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
