use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One failed sample of a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    #[serde(serialize_with = "crate::io::sig17_opt")]
    pub t: Option<f64>,
    #[serde(serialize_with = "crate::io::sig17_vec")]
    pub at: Vec<f64>,
    pub detail: String,
}

/// Serializable outcome of a verification check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub pass: bool,
    pub violations: Vec<Violation>,
    #[serde(serialize_with = "crate::io::sig17_map")]
    pub stats: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(check: &str) -> Self {
        Self { check: check.into(), pass: true, violations: Vec::new(), stats: BTreeMap::new() }
    }

    pub fn stat(mut self, key: &str, value: f64) -> Self {
        self.stats.insert(key.into(), value);
        self
    }

    pub fn violate(&mut self, v: Violation) {
        self.pass = false;
        self.violations.push(v);
    }

    /// Folds several reports into one named `check`; violations keep the
    /// name of the sub-check that produced them.
    pub fn merge(check: &str, parts: &[Report]) -> Self {
        let mut out = Report::new(check);
        for p in parts {
            out.pass &= p.pass;
            for v in &p.violations {
                out.violations.push(Violation { detail: format!("{}: {}", p.check, v.detail), ..v.clone() });
            }
            for (k, v) in &p.stats {
                out.stats.insert(format!("{}.{}", p.check, k), *v);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}
