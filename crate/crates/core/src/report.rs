//! Machine-readable verification reports.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
    /// Coarse-to-fine error ratio when the check was run on two grids.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ratio: Option<f64>,
}

impl Check {
    /// Passes iff `measured <= tol`.
    pub fn at_most(name: impl Into<String>, measured: f64, tol: f64) -> Self {
        Check { name: name.into(), measured, tol, pass: measured <= tol, witness: None, ratio: None }
    }

    /// A check whose pass/fail is decided elsewhere.
    pub fn verdict(name: impl Into<String>, measured: f64, tol: f64, pass: bool) -> Self {
        Check { name: name.into(), measured, tol, pass, witness: None, ratio: None }
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }

    /// Attaches a witness only when the check failed.
    pub fn witness_if_failed(self, w: impl FnOnce() -> String) -> Self {
        if self.pass {
            self
        } else {
            self.with_witness(w())
        }
    }

    pub fn with_ratio(mut self, r: f64) -> Self {
        self.ratio = Some(r);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report { suite: suite.into(), checks: vec![] }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        self.checks.extend(cs);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
