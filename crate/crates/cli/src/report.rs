use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use varparam::verify::{VerificationReport, Verdict};

use crate::problem::ProblemFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionKind {
    /// Explicit `y(x)`.
    Closed,
    /// `left(y) = right(x) + B`.
    Implicit,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Additive constant (classes I/II) or `K` at the anchor (III/IV).
    #[serde(rename = "A")]
    pub a: f64,
    /// Constant of the implicit relation, when there is one.
    #[serde(rename = "B", skip_serializing_if = "Option::is_none", default)]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionSummary {
    pub class: String,
    pub m: u32,
    /// The reduced equation in terms of `K` and `E`.
    pub equation: String,
    pub k: String,
    pub k_route: String,
    pub factor: String,
    /// The reduced right-hand side with everything substituted.
    pub rhs: String,
    pub constants: Constants,
    /// Shape of the reduced first-order equation.
    pub form: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub kind: SolutionKind,
    /// Closed form, relation, or `"numeric"`.
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub form: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub x: f64,
    pub y: f64,
    pub yp: f64,
    /// Class residual; absent where it cannot be evaluated.
    pub residual: Option<f64>,
}

/// Wall-clock milliseconds per phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reduce_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solve_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verify_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub source: String,
    pub input: ProblemFile,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reduction: Option<ReductionSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solution: Option<SolutionSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verification: Option<VerificationReport>,
    #[serde(default)]
    pub table: Vec<TableRow>,
    pub timings: Timings,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// The report with timings cleared, for reproducibility comparisons.
    pub fn without_timings(&self) -> Self {
        RunReport { timings: Timings::default(), ..self.clone() }
    }

    /// `x,y,yp,residual` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,yp,residual\n");
        for r in &self.table {
            let res = r.residual.map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{}", r.x, r.y, r.yp, res).unwrap();
        }
        out
    }

    pub fn verdict(&self) -> Option<Verdict> {
        self.verification.as_ref().map(|v| v.verdict)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchEntry {
    pub file: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub report: Option<RunReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub command: String,
    pub passed: usize,
    pub failed: usize,
    pub entries: Vec<BatchEntry>,
}

impl BatchSummary {
    pub fn new(command: &str, entries: Vec<BatchEntry>) -> Self {
        let passed = entries.iter().filter(|e| e.exit_code == 0).count();
        BatchSummary { command: command.to_string(), passed, failed: entries.len() - passed, entries }
    }

    /// Worst exit code over the entries.
    pub fn exit_code(&self) -> i32 {
        self.entries.iter().map(|e| e.exit_code).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}
