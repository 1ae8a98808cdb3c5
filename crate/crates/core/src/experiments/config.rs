use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde_json::Value as Json;
use toml::{Table, Value};

use super::ExperimentId;
use crate::error::{Error, Result};

/// Seed used when neither the config file nor the command line sets one.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Keys accepted in the `[global]` section of a config file.
const GLOBAL_KEYS: [&str; 6] = ["out", "seed", "threads", "dx", "xmax", "tol"];

/// Grid keys that the command line may override.
const GRID_KEYS: [&str; 3] = ["dx", "xmax", "tol"];

/// What to run and where to write it.
///
/// Parameter precedence, highest first: command-line overrides, the
/// experiment's own section, `[global]`, built-in defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub out: PathBuf,
    pub seed: u64,
    pub threads: Option<usize>,
    section: Table,
    inherited: Table,
    overrides: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn new(id: ExperimentId) -> Self {
        Self {
            id,
            out: PathBuf::from("out"),
            seed: DEFAULT_SEED,
            threads: None,
            section: Table::new(),
            inherited: Table::new(),
            overrides: BTreeMap::new(),
        }
    }

    /// Reads `[global]` and the `[<id>]` section of a TOML file. Other
    /// experiment sections are ignored so that one file can serve every run.
    pub fn from_file(id: ExperimentId, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(id, &text)
    }

    pub fn from_toml(id: ExperimentId, text: &str) -> Result<Self> {
        let doc: Table = text.parse().map_err(|e| Error::Config(format!("config: {e}")))?;
        let mut cfg = Self::new(id);
        for (key, value) in &doc {
            let Value::Table(table) = value else {
                return Err(Error::Config(format!("top-level key `{key}` must be a section")));
            };
            if key == "global" {
                cfg.apply_global(table)?;
            } else if key == id.as_str() {
                cfg.section = table.clone();
            } else if key.parse::<ExperimentId>().is_err() {
                return Err(Error::Config(format!("unknown section `[{key}]`")));
            }
        }
        Ok(cfg)
    }

    fn apply_global(&mut self, table: &Table) -> Result<()> {
        for (key, value) in table {
            match key.as_str() {
                "out" => {
                    let s = value
                        .as_str()
                        .ok_or_else(|| Error::Config("`global.out` must be a string".into()))?;
                    self.out = PathBuf::from(s);
                }
                "seed" => self.seed = nonneg_integer("global.seed", value)?,
                "threads" => self.threads = Some(nonneg_integer("global.threads", value)? as usize),
                k if GRID_KEYS.contains(&k) => {
                    self.inherited.insert(key.clone(), value.clone());
                }
                _ => {
                    return Err(Error::Config(format!(
                        "unknown key `global.{key}`; expected one of {}",
                        GLOBAL_KEYS.join(", ")
                    )))
                }
            }
        }
        Ok(())
    }

    /// Sets `dx`, `xmax` or `tol` from the command line.
    pub fn set_override(&mut self, key: &str, value: f64) -> Result<()> {
        if !GRID_KEYS.contains(&key) {
            return Err(Error::Config(format!("`{key}` cannot be overridden")));
        }
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Config(format!("`--{key}` must be positive, got {value}")));
        }
        self.overrides.insert(key.to_string(), value);
        Ok(())
    }

    pub fn params(&self) -> Params {
        Params {
            section: self.section.clone(),
            inherited: self.inherited.clone(),
            overrides: self.overrides.clone(),
            used: BTreeMap::new(),
        }
    }
}

fn nonneg_integer(name: &str, value: &Value) -> Result<u64> {
    match value {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        other => Err(Error::Config(format!("`{name}` must be a nonnegative integer, found {other}"))),
    }
}

/// Parameter lookup that records every effective value for the manifest.
#[derive(Debug, Clone)]
pub struct Params {
    section: Table,
    inherited: Table,
    overrides: BTreeMap<String, f64>,
    used: BTreeMap<String, Json>,
}

impl Params {
    fn lookup(&self, key: &str) -> Option<&Value> {
        self.section.get(key).or_else(|| self.inherited.get(key))
    }

    fn record(&mut self, key: &str, value: Json) {
        self.used.insert(key.to_string(), value);
    }

    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        let value = match (self.overrides.get(key), self.lookup(key)) {
            (Some(v), _) => *v,
            (None, Some(v)) => as_f64(key, v)?,
            (None, None) => default,
        };
        self.record(key, Json::from(value));
        Ok(value)
    }

    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        let value = match self.lookup(key) {
            Some(v) => nonneg_integer(key, v)? as usize,
            None => default,
        };
        self.record(key, Json::from(value));
        Ok(value)
    }

    pub fn f64_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let value = match self.lookup(key) {
            Some(Value::Array(items)) => items.iter().map(|v| as_f64(key, v)).collect::<Result<_>>()?,
            Some(Value::String(s)) => crate::model::parse_number_list(s)?,
            Some(other) => return Err(Error::Config(format!("`{key}` must be a list, found {other}"))),
            None => default.to_vec(),
        };
        self.record(key, Json::from(value.clone()));
        Ok(value)
    }

    /// List of `[k1, k2]` pairs.
    pub fn pair_list(&mut self, key: &str, default: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
        let value = match self.lookup(key) {
            Some(Value::Array(items)) => items
                .iter()
                .map(|item| match item {
                    Value::Array(pair) if pair.len() == 2 => Ok((as_f64(key, &pair[0])?, as_f64(key, &pair[1])?)),
                    other => Err(Error::Config(format!("`{key}` entries must be [k1, k2] pairs, found {other}"))),
                })
                .collect::<Result<_>>()?,
            Some(other) => return Err(Error::Config(format!("`{key}` must be a list of pairs, found {other}"))),
            None => default.to_vec(),
        };
        let json: Vec<Json> = value.iter().map(|(a, b)| Json::from(vec![*a, *b])).collect();
        self.record(key, Json::from(json));
        Ok(value)
    }

    pub fn string_list(&mut self, key: &str, default: &[&str]) -> Result<Vec<String>> {
        let value: Vec<String> = match self.lookup(key) {
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| Error::Config(format!("`{key}` must hold strings, found {v}")))
                })
                .collect::<Result<_>>()?,
            Some(other) => return Err(Error::Config(format!("`{key}` must be a list of strings, found {other}"))),
            None => default.iter().map(|s| s.to_string()).collect(),
        };
        self.record(key, Json::from(value.clone()));
        Ok(value)
    }

    /// Effective parameters; a key of the experiment section that no runner
    /// read is a configuration error.
    pub fn finish(self) -> Result<BTreeMap<String, Json>> {
        let unknown: BTreeSet<&String> = self.section.keys().filter(|k| !self.used.contains_key(*k)).collect();
        if let Some(k) = unknown.into_iter().next() {
            let known: Vec<&str> = self.used.keys().map(String::as_str).collect();
            return Err(Error::Config(format!("unknown key `{k}`; this experiment reads {}", known.join(", "))));
        }
        Ok(self.used)
    }
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        other => Err(Error::Config(format!("`{key}` must be a number, found {other}"))),
    }
}
