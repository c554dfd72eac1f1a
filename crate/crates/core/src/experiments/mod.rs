//! Reproductions of the counterexamples and of the non-Lipschitz reduction.

mod anyrate;
mod counterexample;
mod curve;
mod defect;
mod rates;
mod rnotlip;
mod sharpmaxf;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use anyrate::{anyrate_curve, run_anyrate, AnyRateOptions};
pub use counterexample::{
    counterexample_phi, gluing_index, interpolation_constant, max_abs_x_plus_y, sigma_disc_min, Counterexample,
    CounterexampleOptions,
};
pub use curve::{curve_sequence, curve_sequence_to, DEFAULT_X_MIN};
pub use defect::{circle_mean, superharmonic_defect, CenterRegion, CircleDefect, CircleSampling, DefectSummary};
pub use rates::{CurveShape, CurveSpec, RateSpec};
pub use rnotlip::{rnotlip_h, run_rnotlip, RnotlipOptions};
pub use sharpmaxf::{default_cutoffs, kernel_integral, run_sharpmaxf, SharpMaxfOptions};

/// A measured number and the tolerance it is reported with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Tabular data emitted next to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attachment {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Attachment {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub parameters: serde_json::Value,
    pub measurements: BTreeMap<String, Measured>,
    pub checks: Vec<Check>,
    pub verdict: String,
    #[serde(skip)]
    pub attachments: Vec<Attachment>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, parameters: serde_json::Value) -> Self {
        Self {
            experiment: experiment.to_string(),
            parameters,
            measurements: BTreeMap::new(),
            checks: Vec::new(),
            verdict: String::new(),
            attachments: Vec::new(),
        }
    }

    pub fn measure(&mut self, name: &str, value: f64, tolerance: f64) {
        self.measurements.insert(name.to_string(), Measured { value, tolerance });
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) -> bool {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
        passed
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.measurements.get(name).map(|m| m.value)
    }

    pub fn check_passed(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn attachment(&self, name: &str) -> Option<&Attachment> {
        self.attachments.iter().find(|a| a.name == name)
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
