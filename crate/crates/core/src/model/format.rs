//! Plain-text key–value form of trait sets and kernels.
//!
//! ```toml
//! count = 2
//! values = "5.0000000000000000e-1,2.5000000000000000e0"
//! ```
//!
//! ```toml
//! dimension = 2
//! entries = "7.0000000000000000e-1,3.0000000000000000e-1,5.0000000000000000e-1,5.0000000000000000e-1"
//! ```
//!
//! Kernel entries are row-major. Numbers are written with 17 significant
//! digits; on input both a comma-separated string and a TOML array of numbers
//! are accepted.

use nalgebra::DMatrix;
use toml::{Table, Value};

use super::kernel::HeredityKernel;
use super::traits::TraitSet;
use crate::csv::fmt_f64;
use crate::error::{Error, Result};

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(fmt_f64).collect::<Vec<_>>().join(",")
}

pub fn traits_to_toml(traits: &TraitSet) -> String {
    format!(
        "count = {}\nvalues = \"{}\"\n",
        traits.len(),
        join(traits.values().iter().copied())
    )
}

pub fn kernel_to_toml(kernel: &HeredityKernel) -> String {
    format!(
        "dimension = {}\nentries = \"{}\"\n",
        kernel.dim(),
        join(kernel.to_row_major())
    )
}

pub fn traits_from_toml(text: &str) -> Result<TraitSet> {
    traits_from_table(&parse(text)?)
}

pub fn kernel_from_toml(text: &str) -> Result<HeredityKernel> {
    kernel_from_table(&parse(text)?)
}

fn parse(text: &str) -> Result<Table> {
    text.parse::<Table>()
        .map_err(|e| Error::Config(e.to_string()))
}

fn traits_from_table(table: &Table) -> Result<TraitSet> {
    let values = number_list(table, "values")?;
    if let Some(count) = integer(table, "count")? {
        if count != values.len() {
            return Err(Error::DimensionMismatch {
                expected: count,
                found: values.len(),
            });
        }
    }
    TraitSet::new(values)
}

fn kernel_from_table(table: &Table) -> Result<HeredityKernel> {
    let entries = number_list(table, "entries")?;
    let n = match integer(table, "dimension")? {
        Some(n) => n,
        None => (entries.len() as f64).sqrt().round() as usize,
    };
    if n * n != entries.len() {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: entries.len(),
        });
    }
    HeredityKernel::new(DMatrix::from_row_slice(n, n, &entries))
}

fn integer(table: &Table, key: &str) -> Result<Option<usize>> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
        Some(other) => Err(Error::Config(format!("`{key}` must be a nonnegative integer, found {other}"))),
    }
}

fn number_list(table: &Table, key: &str) -> Result<Vec<f64>> {
    match table.get(key) {
        Some(Value::String(s)) => parse_number_list(s),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| match v {
                Value::Float(x) => Ok(*x),
                Value::Integer(i) => Ok(*i as f64),
                other => Err(Error::Config(format!("`{key}` holds a non-number {other}"))),
            })
            .collect(),
        Some(other) => Err(Error::Config(format!("`{key}` must be a list, found {other}"))),
        None => Err(Error::Config(format!("missing key `{key}`"))),
    }
}

/// Comma-separated decimals, whitespace tolerated.
pub fn parse_number_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("`{s}` is not a number")))
        })
        .collect()
}
