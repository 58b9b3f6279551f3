//! Check results shared by the verification harness and the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Numerical noise exceeded the signal the check relies on.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub status: Status,
    pub refinement_order: Option<f64>,
}

impl CheckReport {
    /// Report with `pass ⇔ residual ≤ tolerance`; NaN residuals fail.
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let pass = residual <= tolerance;
        Self {
            name: name.into(),
            parameters: BTreeMap::new(),
            residual,
            tolerance,
            pass,
            status: if pass { Status::Pass } else { Status::Fail },
            refinement_order: None,
        }
    }

    /// A check whose noise floor `noise` exceeds the tolerance. The reported
    /// residual is raised to the noise floor so that `pass` stays false.
    pub fn inconclusive(name: impl Into<String>, residual: f64, noise: f64, tolerance: f64) -> Self {
        let mut r = Self::new(name, residual.max(noise), tolerance);
        r.pass = false;
        r.status = Status::Inconclusive;
        r
    }

    /// A check that could not be carried out at all (e.g. a quadrature
    /// failure); recorded as a failure with an infinite residual.
    pub fn failed(name: impl Into<String>, tolerance: f64, reason: impl Into<String>) -> Self {
        let mut r = Self::new(name, f64::INFINITY, tolerance);
        r.parameters.insert("error".into(), serde_json::Value::String(reason.into()));
        r
    }

    pub fn with_param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn with_order(mut self, order: f64) -> Self {
        self.refinement_order = Some(order);
        self
    }

    pub fn summary_line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        format!("{tag} {} residual={:e} tol={:e}", self.name, self.residual, self.tolerance)
    }
}

/// Counts of a batch of reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

impl Tally {
    pub fn of(reports: &[CheckReport]) -> Self {
        let mut t = Tally::default();
        for r in reports {
            match r.status {
                Status::Pass => t.pass += 1,
                Status::Fail => t.fail += 1,
                Status::Inconclusive => t.inconclusive += 1,
            }
        }
        t
    }
}
