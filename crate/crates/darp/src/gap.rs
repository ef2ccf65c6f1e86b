//! Best known solutions, primal gaps and gap profiles.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

/// The table shipped with the crate, `instance,bks`.
pub const BUILTIN_BKS: &str = include_str!("../data/bks.csv");

#[derive(Debug, Error)]
pub enum GapError {
    #[error("no best known solution for instance {0:?}")]
    UnknownInstance(String),
    #[error("bad BKS table: {0}")]
    Table(#[from] csv::Error),
    #[error("best known solution of {0:?} must be positive")]
    NonPositive(String),
}

#[derive(Debug, Deserialize)]
struct Row {
    instance: String,
    bks: f64,
}

/// Best known objectives keyed by instance name. Benchmark names `R{i}a`
/// and `R{i}b` also answer to their file names `pr{i}` and `pr{i+10}`.
#[derive(Debug, Clone, Default)]
pub struct BksTable {
    values: BTreeMap<String, f64>,
}

/// File name of a benchmark label: `R3a` → `pr03`, `R3b` → `pr13`.
pub fn file_alias(label: &str) -> Option<String> {
    let rest = label.strip_prefix('R')?;
    let (num, series) = rest.split_at(rest.len().checked_sub(1)?);
    let i: u32 = num.parse().ok()?;
    match series {
        "a" => Some(format!("pr{i:02}")),
        "b" => Some(format!("pr{:02}", i + 10)),
        _ => None,
    }
}

impl BksTable {
    pub fn builtin() -> Self {
        Self::from_csv(BUILTIN_BKS.as_bytes()).expect("shipped table parses")
    }

    pub fn from_csv(reader: impl std::io::Read) -> Result<Self, GapError> {
        let mut values = BTreeMap::new();
        for row in csv::Reader::from_reader(reader).deserialize() {
            let Row { instance, bks } = row?;
            if bks <= 0.0 {
                return Err(GapError::NonPositive(instance));
            }
            if let Some(alias) = file_alias(&instance) {
                values.insert(alias, bks);
            }
            values.insert(instance, bks);
        }
        Ok(BksTable { values })
    }

    pub fn from_path(path: &Path) -> Result<Self, GapError> {
        Self::from_csv(std::fs::File::open(path).map_err(csv::Error::from)?)
    }

    pub fn get(&self, instance: &str) -> Result<f64, GapError> {
        self.values.get(instance).copied().ok_or_else(|| GapError::UnknownInstance(instance.to_string()))
    }
}

/// `(objective − bks) / bks`, or 1 without an incumbent.
pub fn primal_gap(objective: Option<f64>, bks: f64) -> f64 {
    match objective {
        Some(obj) => (obj - bks) / bks,
        None => 1.0,
    }
}

/// Fraction of instances solved within each gap threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct GapProfile {
    /// Per instance, in input order.
    pub gaps: Vec<(String, f64)>,
}

impl GapProfile {
    /// `results` pairs instance names with the best objective found
    /// (unscaled), if any.
    pub fn new(results: &[(String, Option<f64>)], table: &BksTable) -> Result<Self, GapError> {
        let gaps = results
            .iter()
            .map(|(name, obj)| Ok((name.clone(), primal_gap(*obj, table.get(name)?))))
            .collect::<Result<_, GapError>>()?;
        Ok(GapProfile { gaps })
    }

    /// `γ(τ)`: share of instances with gap at most `tau`.
    pub fn fraction(&self, tau: f64) -> f64 {
        if self.gaps.is_empty() {
            return 0.0;
        }
        let within = self.gaps.iter().filter(|(_, g)| *g <= tau).count();
        within as f64 / self.gaps.len() as f64
    }

    /// `(τ, γ(τ))` at evenly spaced thresholds from 0 to `max_tau`.
    pub fn curve(&self, max_tau: f64, steps: usize) -> Vec<(f64, f64)> {
        (0..=steps)
            .map(|s| {
                let tau = max_tau * s as f64 / steps.max(1) as f64;
                (tau, self.fraction(tau))
            })
            .collect()
    }
}
