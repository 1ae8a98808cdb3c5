use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Which mean a trait sweep is pinned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanKind {
    Arithmetic,
    Geometric,
    Harmonic,
}

impl MeanKind {
    pub const ALL: [MeanKind; 3] = [MeanKind::Arithmetic, MeanKind::Geometric, MeanKind::Harmonic];

    /// Short label used in CSV columns.
    pub fn label(self) -> &'static str {
        match self {
            MeanKind::Arithmetic => "m_A",
            MeanKind::Geometric => "m_G",
            MeanKind::Harmonic => "m_H",
        }
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MeanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" | "m_a" | "arithmetic" => Ok(MeanKind::Arithmetic),
            "g" | "m_g" | "geometric" => Ok(MeanKind::Geometric),
            "h" | "m_h" | "harmonic" => Ok(MeanKind::Harmonic),
            other => Err(domain("mean kind", format!("unknown mean `{other}`"))),
        }
    }
}

/// How a trait set was produced by [`make_trait_set`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraitSweep {
    pub sigma: f64,
    pub vbar: f64,
    pub kind: MeanKind,
}

/// Strictly increasing, strictly positive growth-rate multipliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitSet {
    values: Vec<f64>,
    sweep: Option<TraitSweep>,
}

impl TraitSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("traits", "at least one trait is required"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(domain("traits", format!("trait {v} is not strictly positive")));
        }
        if let Some(w) = values.windows(2).find(|w| w[1] <= w[0]) {
            return Err(domain(
                "traits",
                format!("traits must be strictly increasing ({} then {})", w[0], w[1]),
            ));
        }
        Ok(Self {
            values,
            sweep: None,
        })
    }

    /// Sorts the input first; equal values are still rejected.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(f64::total_cmp);
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn sweep(&self) -> Option<TraitSweep> {
        self.sweep
    }

    pub fn mean(&self, kind: MeanKind) -> f64 {
        mean(self, kind)
    }
}

pub fn mean(traits: &TraitSet, kind: MeanKind) -> f64 {
    let v = traits.values();
    let m = v.len() as f64;
    match kind {
        MeanKind::Arithmetic => v.iter().sum::<f64>() / m,
        MeanKind::Geometric => (v.iter().map(|x| x.ln()).sum::<f64>() / m).exp(),
        MeanKind::Harmonic => m / v.iter().map(|x| 1.0 / x).sum::<f64>(),
    }
}

/// Supremum of admissible ranges σ for a sweep pinned at `vbar`.
///
/// Arithmetic sets need `vbar - σ/2 > 0`; the geometric and harmonic
/// constructions stay positive for every finite σ.
pub fn sigma_limit(vbar: f64, kind: MeanKind) -> f64 {
    match kind {
        MeanKind::Arithmetic => 2.0 * vbar,
        MeanKind::Geometric | MeanKind::Harmonic => f64::INFINITY,
    }
}

/// `m` traits with range `sigma` whose `kind`-mean equals `vbar`.
pub fn make_trait_set(m: usize, sigma: f64, vbar: f64, kind: MeanKind) -> Result<TraitSet> {
    if m == 0 {
        return Err(domain("M", "at least one trait is required"));
    }
    if !(vbar.is_finite() && vbar > 0.0) {
        return Err(domain("vbar", format!("{vbar} is not strictly positive")));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(domain("sigma", format!("{sigma} is not a nonnegative number")));
    }
    let limit = sigma_limit(vbar, kind);
    if sigma >= limit {
        return Err(domain(
            "sigma",
            format!("{sigma} outside the admissible range [0, {limit}) for {kind}"),
        ));
    }
    if sigma == 0.0 {
        // Zero range collapses to a homogeneous population.
        let mut set = TraitSet::new(vec![vbar])?;
        set.sweep = Some(TraitSweep { sigma, vbar, kind });
        return Ok(set);
    }
    if m == 1 {
        return Err(domain("sigma", "a single trait cannot have a positive range"));
    }
    let steps = (m - 1) as f64;
    let mut values: Vec<f64> = match kind {
        MeanKind::Arithmetic => {
            let a = vbar - sigma / 2.0;
            (0..m).map(|i| a + sigma * i as f64 / steps).collect()
        }
        MeanKind::Geometric => {
            let b = (sigma + (sigma * sigma + 4.0 * vbar * vbar).sqrt()) / 2.0;
            let (la, lb) = ((b - sigma).ln(), b.ln());
            let mut v: Vec<f64> = (0..m)
                .map(|i| (la + (lb - la) * i as f64 / steps).exp())
                .collect();
            v[0] = b - sigma;
            v[m - 1] = b;
            v
        }
        MeanKind::Harmonic => {
            let s = vbar + (vbar * vbar + sigma * sigma).sqrt();
            let (a, b) = ((s - sigma) / 2.0, (s + sigma) / 2.0);
            let (ia, ib) = (1.0 / a, 1.0 / b);
            // Reciprocals are equally spaced; walk them from 1/a down to 1/b.
            let mut v: Vec<f64> = (0..m)
                .map(|i| 1.0 / (ia + (ib - ia) * i as f64 / steps))
                .collect();
            v[0] = a;
            v[m - 1] = b;
            v
        }
    };
    if kind == MeanKind::Arithmetic {
        values[m - 1] = vbar + sigma / 2.0;
    }
    let mut set = TraitSet::new(values)?;
    set.sweep = Some(TraitSweep { sigma, vbar, kind });
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn set(v: &[f64]) -> TraitSet {
        TraitSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn means_of_one_and_four() {
        let t = set(&[1.0, 4.0]);
        assert_relative_eq!(mean(&t, MeanKind::Arithmetic), 2.5, max_relative = 1e-15);
        assert_relative_eq!(mean(&t, MeanKind::Geometric), 2.0, max_relative = 1e-15);
        assert_relative_eq!(mean(&t, MeanKind::Harmonic), 1.6, max_relative = 1e-15);
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(TraitSet::new(vec![]).is_err());
        assert!(TraitSet::new(vec![1.0, 1.0]).is_err());
        assert!(TraitSet::new(vec![2.0, 1.0]).is_err());
        assert!(TraitSet::new(vec![0.0, 1.0]).is_err());
        assert!(TraitSet::new(vec![f64::NAN]).is_err());
        assert!(TraitSet::from_unsorted(vec![2.0, 1.0]).is_ok());
    }

    #[test]
    fn sweep_examples() {
        let a = make_trait_set(2, 6.0, 4.0, MeanKind::Arithmetic).unwrap();
        assert_eq!(a.values(), &[1.0, 7.0]);
        let g = make_trait_set(2, 3.0, 2.0, MeanKind::Geometric).unwrap();
        assert_relative_eq!(g.values()[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(g.values()[1], 4.0, max_relative = 1e-14);
        let h = make_trait_set(2, 3.0, 1.6, MeanKind::Harmonic).unwrap();
        assert_relative_eq!(h.values()[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(h.values()[1], 4.0, max_relative = 1e-14);
    }

    #[test]
    fn sweep_errors() {
        assert!(make_trait_set(3, 8.0, 4.0, MeanKind::Arithmetic).is_err());
        assert!(make_trait_set(1, 1.0, 4.0, MeanKind::Geometric).is_err());
        assert!(make_trait_set(3, -1.0, 4.0, MeanKind::Geometric).is_err());
        assert!(make_trait_set(3, 100.0, 4.0, MeanKind::Harmonic).is_ok());
    }

    #[test]
    fn zero_range_is_homogeneous() {
        let t = make_trait_set(10, 0.0, 4.0, MeanKind::Harmonic).unwrap();
        assert_eq!(t.values(), &[4.0]);
        assert_eq!(t.sweep().unwrap().kind, MeanKind::Harmonic);
    }
}
