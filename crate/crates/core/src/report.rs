//! Bound reports and their tabular / structured renderings.

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::complexity::Complexity;
use crate::error::{LabError, Result};
use crate::rational::{self, serde_rational, Rational};

/// Tolerance applied to asserted checks whose slack is not an exact rational.
pub const REAL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Exact(#[serde(with = "serde_rational")] Rational),
    Real(f64),
    Infinite,
    NegInfinite,
}

impl Value {
    pub fn real(x: f64) -> Value {
        if x == f64::INFINITY {
            Value::Infinite
        } else if x == f64::NEG_INFINITY {
            Value::NegInfinite
        } else {
            Value::Real(x)
        }
    }

    pub fn int(n: i64) -> Value {
        Value::Exact(rational::int(n))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational::to_f64(r),
            Value::Real(x) => *x,
            Value::Infinite => f64::INFINITY,
            Value::NegInfinite => f64::NEG_INFINITY,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::real(self.to_f64() + other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a - b),
            // Both sides unwitnessed: nothing is violated.
            (Value::Infinite, Value::Infinite) | (Value::NegInfinite, Value::NegInfinite) => {
                Value::Infinite
            }
            _ => Value::real(self.to_f64() - other.to_f64()),
        }
    }

    /// Non-negativity with the tolerance appropriate to the value's kind.
    pub fn nonnegative(&self) -> bool {
        match self {
            Value::Exact(r) => !r.is_negative(),
            Value::Real(x) => *x >= -REAL_TOLERANCE,
            Value::Infinite => true,
            Value::NegInfinite => false,
        }
    }
}

impl From<Complexity> for Value {
    fn from(c: Complexity) -> Value {
        match c {
            Complexity::Finite(n) => Value::int(n as i64),
            Complexity::Infinite => Value::Infinite,
        }
    }
}

impl From<Rational> for Value {
    fn from(r: Rational) -> Value {
        Value::Exact(r)
    }
}

/// Decimal with 12 significant digits, trailing zeros trimmed.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).clamp(0, 60) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => f.write_str(&rational::format(r)),
            Value::Real(x) => f.write_str(&format_real(*x)),
            Value::Infinite => f.write_str("inf"),
            Value::NegInfinite => f.write_str("-inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// A machine-exact inequality or identity; failure is a defect.
    AssertedExact,
    /// A quantity whose relation to its bound involves hidden constants.
    MeasuredOnly,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportBudgets {
    pub max_len: Option<usize>,
    pub max_steps: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs: Value,
    pub rhs: Value,
    pub rhs_terms: Vec<(String, Value)>,
    /// `rhs - lhs`.
    pub slack: Value,
    pub verdict: Verdict,
    pub budgets: ReportBudgets,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn new(name: impl Into<String>, verdict: Verdict, lhs: Value, rhs: Value) -> Self {
        BoundReport {
            name: name.into(),
            slack: rhs.sub(&lhs),
            lhs,
            rhs,
            rhs_terms: Vec::new(),
            verdict,
            budgets: ReportBudgets::default(),
            notes: Vec::new(),
        }
    }

    /// Asserts `lhs <= rhs`.
    pub fn asserted(name: impl Into<String>, lhs: Value, rhs: Value) -> Self {
        Self::new(name, Verdict::AssertedExact, lhs, rhs)
    }

    pub fn measured(name: impl Into<String>, lhs: Value, rhs: Value) -> Self {
        Self::new(name, Verdict::MeasuredOnly, lhs, rhs)
    }

    /// Asserted count of violations; passes iff zero.
    pub fn violations(name: impl Into<String>, count: usize) -> Self {
        Self::asserted(name, Value::int(count as i64), Value::int(0))
    }

    pub fn term(mut self, name: impl Into<String>, value: impl Into<Value>) -> Self {
        self.rhs_terms.push((name.into(), value.into()));
        self
    }

    pub fn budgets(mut self, max_len: usize, max_steps: u64) -> Self {
        self.budgets = ReportBudgets {
            max_len: Some(max_len),
            max_steps: Some(max_steps),
        };
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// `Some(pass)` for asserted reports, `None` for measured ones.
    pub fn passed(&self) -> Option<bool> {
        match self.verdict {
            Verdict::AssertedExact => Some(self.slack.nonnegative()),
            Verdict::MeasuredOnly => None,
        }
    }

    pub fn failed(&self) -> bool {
        self.passed() == Some(false)
    }

    pub fn slack_is_exact_zero(&self) -> bool {
        matches!(&self.slack, Value::Exact(r) if r.is_zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Tabular,
    Structured,
}

impl std::str::FromStr for ReportFormat {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tabular" | "csv" => Ok(ReportFormat::Tabular),
            "structured" | "jsonl" => Ok(ReportFormat::Structured),
            _ => Err(LabError::InvalidArgument(format!("unknown report format {s:?}"))),
        }
    }
}

pub const TABULAR_HEADER: [&str; 9] = [
    "name", "lhs", "rhs", "rhs_terms", "slack", "verdict", "passed", "budget_L", "budget_S",
];

pub fn render_tabular(reports: &[BoundReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TABULAR_HEADER).unwrap();
    for r in reports {
        let terms = r
            .rhs_terms
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        let passed = match r.passed() {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "-",
        };
        let opt = |o: Option<String>| o.unwrap_or_else(|| "-".into());
        w.write_record([
            r.name.clone(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            terms,
            r.slack.to_string(),
            format!("{:?}", r.verdict),
            passed.to_string(),
            opt(r.budgets.max_len.map(|v| v.to_string())),
            opt(r.budgets.max_steps.map(|v| v.to_string())),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

pub fn render_structured(reports: &[BoundReport]) -> String {
    reports
        .iter()
        .map(|r| serde_json::to_string(r).unwrap() + "\n")
        .collect()
}

pub fn emit_report(reports: &[BoundReport], format: ReportFormat, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    let text = match format {
        ReportFormat::Tabular => render_tabular(reports),
        ReportFormat::Structured => render_structured(reports),
    };
    fs::write(path, text).map_err(|e| LabError::io(path, e))
}

pub fn read_structured(path: &Path) -> Result<Vec<BoundReport>> {
    let file = fs::File::open(path).map_err(|e| LabError::io(path, e))?;
    BufReader::new(file)
        .lines()
        .enumerate()
        .map(|(i, line)| {
            let line = line.map_err(|e| LabError::io(path, e))?;
            serde_json::from_str(&line).map_err(|e| LabError::MalformedSnapshot {
                line: i + 1,
                reason: e.to_string(),
            })
        })
        .collect()
}
