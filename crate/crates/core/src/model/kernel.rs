use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::SplitMix64;

/// Tolerance on each row sum of a heredity kernel.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Row-stochastic, irreducible matrix of mother-to-daughter trait transitions.
///
/// Entry `(i, j)` is the probability that a mother carrying trait `i` produces
/// a daughter carrying trait `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeredityKernel {
    entries: DMatrix<f64>,
}

/// Outcome of [`validate_kernel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub dimension: usize,
    pub square: bool,
    pub nonnegative: bool,
    pub max_row_sum_error: f64,
    pub stochastic: bool,
    pub irreducible: bool,
    /// A trait pair `(from, to)` with no positive-probability path, if any.
    pub unreachable: Option<(usize, usize)>,
}

impl KernelReport {
    pub fn is_valid(&self) -> bool {
        self.square && self.nonnegative && self.stochastic && self.irreducible
    }

    fn describe(&self) -> String {
        if !self.square {
            "matrix is not square".into()
        } else if !self.nonnegative {
            "negative or non-finite entry".into()
        } else if !self.stochastic {
            format!("row sums differ from 1 by {:.3e}", self.max_row_sum_error)
        } else if let Some((i, j)) = self.unreachable {
            format!("reducible: trait {j} is unreachable from trait {i}")
        } else {
            "valid".into()
        }
    }
}

pub fn validate_kernel(entries: &DMatrix<f64>) -> KernelReport {
    let n = entries.nrows();
    let square = n == entries.ncols() && n > 0;
    if !square {
        return KernelReport {
            dimension: n,
            square,
            nonnegative: false,
            max_row_sum_error: f64::NAN,
            stochastic: false,
            irreducible: false,
            unreachable: None,
        };
    }
    let nonnegative = entries.iter().all(|x| x.is_finite() && *x >= 0.0);
    let max_row_sum_error = (0..n)
        .map(|i| (entries.row(i).iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    let unreachable = unreachable_pair(entries);
    KernelReport {
        dimension: n,
        square,
        nonnegative,
        max_row_sum_error,
        stochastic: nonnegative && max_row_sum_error <= ROW_SUM_TOL,
        irreducible: unreachable.is_none(),
        unreachable,
    }
}

/// Strong connectivity of the graph `i -> j` iff `k[(i, j)] > 0`: every node
/// must be reachable from node 0 both forwards and backwards.
fn unreachable_pair(k: &DMatrix<f64>) -> Option<(usize, usize)> {
    let n = k.nrows();
    for forward in [true, false] {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                let w = if forward { k[(i, j)] } else { k[(j, i)] };
                if w > 0.0 && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Some(if forward { (0, j) } else { (j, 0) });
        }
    }
    None
}

impl HeredityKernel {
    /// Validates an arbitrary matrix.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let report = validate_kernel(&entries);
        if !report.is_valid() {
            return Err(Error::InvalidKernel(report.describe()));
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn report(&self) -> KernelReport {
        validate_kernel(&self.entries)
    }

    /// Entries row-major.
    pub fn to_row_major(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.entries[(i, j)])
            .collect()
    }

    /// The common diagonal value if this kernel belongs to the α-family.
    pub fn alpha_parameter(&self) -> Option<f64> {
        let n = self.dim();
        if n < 2 {
            return None;
        }
        let alpha = self.entries[(0, 0)];
        let off = (1.0 - alpha) / (n - 1) as f64;
        let fits = (0..n).all(|i| {
            (0..n).all(|j| {
                let expect = if i == j { alpha } else { off };
                (self.entries[(i, j)] - expect).abs() <= 4.0 * f64::EPSILON
            })
        });
        fits.then_some(alpha)
    }

    /// The common row if every row is identical.
    pub fn common_row(&self) -> Option<Vec<f64>> {
        let n = self.dim();
        let first: Vec<f64> = self.entries.row(0).iter().copied().collect();
        let same = (1..n).all(|i| (0..n).all(|j| self.entries[(i, j)] == first[j]));
        same.then_some(first)
    }
}

/// Two-trait kernel with switching probabilities `k1` (1 to 2) and `k2` (2 to 1).
pub fn make_kernel_bimodal(k1: f64, k2: f64) -> Result<HeredityKernel> {
    for (name, k) in [("k1", k1), ("k2", k2)] {
        if !(k > 0.0 && k < 1.0) {
            return Err(domain(name, format!("{k} is not in the open interval (0, 1)")));
        }
    }
    HeredityKernel::new(DMatrix::from_row_slice(
        2,
        2,
        &[1.0 - k1, k1, k2, 1.0 - k2],
    ))
}

/// Heredity threshold `1/2 + 1/(2M)` of the α-family.
pub fn alpha_threshold(m: usize) -> f64 {
    0.5 + 0.5 / m as f64
}

/// Diagonal `alpha`, every other entry `(1 - alpha)/(M - 1)`.
pub fn make_kernel_alpha(m: usize, alpha: f64) -> Result<HeredityKernel> {
    if m < 2 {
        return Err(domain("M", format!("{m} < 2")));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(domain(
            "alpha",
            format!("{alpha} is not in [0, 1) (alpha = 1 isolates every trait)"),
        ));
    }
    let off = (1.0 - alpha) / (m - 1) as f64;
    HeredityKernel::new(DMatrix::from_fn(m, m, |i, j| if i == j { alpha } else { off }))
}

/// Daughter trait drawn from `weights` regardless of the mother.
pub fn make_kernel_noheredity(weights: &[f64]) -> Result<HeredityKernel> {
    if weights.is_empty() {
        return Err(domain("weights", "empty weight vector"));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(domain("weights", format!("weight {w} is not strictly positive")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > ROW_SUM_TOL {
        return Err(domain("weights", format!("weights sum to {total}, not 1")));
    }
    let m = weights.len();
    HeredityKernel::new(DMatrix::from_fn(m, m, |_, j| weights[j]))
}

/// Entries uniform on `[0, 1)` from [`SplitMix64`] in row-major order, each
/// row then divided by its sum. A row summing to zero is redrawn.
pub fn make_kernel_random(m: usize, seed: u64) -> Result<HeredityKernel> {
    if m < 2 {
        return Err(domain("M", format!("{m} < 2")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut entries = DMatrix::zeros(m, m);
    for i in 0..m {
        loop {
            let row: Vec<f64> = (0..m).map(|_| rng.next_f64()).collect();
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                for (j, x) in row.into_iter().enumerate() {
                    entries[(i, j)] = x / total;
                }
                break;
            }
        }
    }
    HeredityKernel::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bimodal_rows() {
        let k = make_kernel_bimodal(0.3, 0.5).unwrap();
        assert_eq!(k.to_row_major(), vec![0.7, 0.3, 0.5, 0.5]);
        assert!(make_kernel_bimodal(0.0, 0.5).is_err());
        assert!(make_kernel_bimodal(0.5, 1.0).is_err());
        match make_kernel_bimodal(0.5, 1.5) {
            Err(Error::Domain { param, .. }) => assert_eq!(param, "k2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn alpha_family() {
        let k = make_kernel_alpha(10, 0.55).unwrap();
        assert_eq!(k.get(3, 3), 0.55);
        assert!((k.get(3, 4) - 0.05).abs() < 1e-16);
        assert_eq!(k.alpha_parameter(), Some(0.55));
        let k = make_kernel_alpha(3, 0.0).unwrap();
        assert_eq!(k.to_row_major(), vec![0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0]);
        assert_eq!(make_kernel_alpha(2, 0.5).unwrap(), make_kernel_bimodal(0.5, 0.5).unwrap());
        assert!(make_kernel_alpha(4, 1.0).is_err());
        assert!(make_kernel_alpha(4, -0.1).is_err());
        assert!(make_kernel_alpha(1, 0.5).is_err());
        assert_eq!(alpha_threshold(10), 0.55);
    }

    #[test]
    fn noheredity_rows() {
        let k = make_kernel_noheredity(&[1.0]).unwrap();
        assert_eq!(k.dim(), 1);
        let k = make_kernel_noheredity(&[0.2, 0.3, 0.5]).unwrap();
        for i in 0..3 {
            assert_eq!(k.matrix().row(i).iter().copied().collect::<Vec<_>>(), vec![0.2, 0.3, 0.5]);
        }
        assert_eq!(k.common_row(), Some(vec![0.2, 0.3, 0.5]));
        assert!(make_kernel_noheredity(&[0.0, 1.0]).is_err());
        assert!(make_kernel_noheredity(&[0.5, 0.6]).is_err());
    }

    #[test]
    fn random_is_deterministic() {
        let a = make_kernel_random(5, 7).unwrap();
        let b = make_kernel_random(5, 7).unwrap();
        assert_eq!(a.to_row_major(), b.to_row_major());
        assert!(a.to_row_major().iter().all(|x| *x > 0.0 && *x < 1.0));
        assert!(a.report().max_row_sum_error <= ROW_SUM_TOL);
        let c = make_kernel_random(10, 1).unwrap();
        let d = make_kernel_random(10, 2).unwrap();
        assert_ne!(c.to_row_major(), d.to_row_major());
    }

    #[test]
    fn validation_reports() {
        let id = DMatrix::<f64>::identity(2, 2);
        let r = validate_kernel(&id);
        assert!(r.stochastic && !r.irreducible);
        assert!(HeredityKernel::new(id).is_err());

        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(validate_kernel(&swap).is_valid());

        let fig = DMatrix::from_row_slice(2, 2, &[0.7, 0.3, 0.5, 0.5]);
        assert!(validate_kernel(&fig).is_valid());

        // 0 -> 1 -> 2 with no way back to 0.
        let chain = DMatrix::from_row_slice(3, 3, &[0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.0, 0.5, 0.5]);
        let r = validate_kernel(&chain);
        assert!(!r.irreducible);
        assert_eq!(r.unreachable, Some((1, 0)));

        let off = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.6]);
        assert!(!validate_kernel(&off).stochastic);
        let neg = DMatrix::from_row_slice(2, 2, &[1.5, -0.5, 0.5, 0.5]);
        assert!(!validate_kernel(&neg).nonnegative);
    }
}
