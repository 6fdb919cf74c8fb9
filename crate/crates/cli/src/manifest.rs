//! Run manifest: per-check verdicts, measured values and output digests.

use std::collections::BTreeMap;

use nctorus_core::format::fmt_real;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

/// A float written to JSON with 17 significant digits, or `null` if not finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            RawValue::from_string(fmt_real(self.0)).map_err(serde::ser::Error::custom)?.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value < tolerance`.
    Below,
    /// `value <= tolerance`.
    AtMost,
    /// `value > tolerance`.
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Real,
    pub tolerance: Real,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, comparison: Comparison, tolerance: f64) -> Self {
        let passed = match comparison {
            Comparison::Below => value < tolerance,
            Comparison::AtMost => value <= tolerance,
            Comparison::Above => value > tolerance,
        };
        Check { name: name.into(), value: Real(value), tolerance: Real(tolerance), comparison, passed }
    }

    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, Comparison::Below, tolerance)
    }

    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, Comparison::AtMost, tolerance)
    }

    pub fn above(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, Comparison::Above, tolerance)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

/// A result file held in memory until the single write at the end of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

impl OutputFile {
    pub fn record(&self) -> OutputRecord {
        OutputRecord {
            file: self.name.clone(),
            sha256: hex::encode(Sha256::digest(self.contents.as_bytes())),
            bytes: self.contents.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    /// Seconds; present only when `record_wall_time` is set.
    pub wall_time: Option<Real>,
    pub outputs: Vec<OutputRecord>,
    pub checks: Vec<Check>,
    pub values: BTreeMap<String, Real>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl RunManifest {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_use_seventeen_digits() {
        let v = serde_json::to_string(&[Real(0.1), Real(f64::NAN), Real(-2.0)]).unwrap();
        assert_eq!(v, "[1.0000000000000001e-1,null,-2.0000000000000000e0]");
        let back: Vec<Option<f64>> = serde_json::from_str(&v).unwrap();
        assert_eq!(back, vec![Some(0.1), None, Some(-2.0)]);
    }

    #[test]
    fn comparisons() {
        assert!(Check::below("a", 0.01, 0.02).passed);
        assert!(!Check::below("a", 0.02, 0.02).passed);
        assert!(Check::at_most("a", 0.0, 0.0).passed);
        assert!(!Check::above("a", 1.0, 1.0).passed);
        assert!(!Check::below("a", f64::NAN, 1.0).passed);
    }
}
