//! Verification reports: every computed number travels with the tolerance it
//! was judged against and the verdict.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

/// One judged quantity. `value` is `null` when the computation itself failed
/// or when the check is a yes/no outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// A computed output wrapped with its acceptance verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Judged<T: Serialize> {
    pub value: T,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub instances: usize,
    pub parameters: Value,
    pub checks: Vec<Measurement>,
    pub data: Map<String, Value>,
    pub passed: bool,
    pub first_failure: Option<String>,
    #[serde(skip)]
    pub summary: Vec<String>,
}

impl Report {
    pub fn new(command: &str, seed: u64, instances: usize, parameters: Value) -> Self {
        Self {
            command: command.to_string(),
            seed,
            instances,
            parameters,
            checks: Vec::new(),
            data: Map::new(),
            passed: true,
            first_failure: None,
            summary: Vec::new(),
        }
    }

    fn push(&mut self, m: Measurement) {
        if !m.pass && self.first_failure.is_none() {
            self.first_failure = Some(m.name.clone());
        }
        self.passed &= m.pass;
        self.checks.push(m);
    }

    /// Passes when `residual ≤ tolerance`. NaN fails.
    pub fn residual(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) -> bool {
        let pass = residual <= tolerance;
        self.push(Measurement {
            name: name.into(),
            value: Some(residual),
            expected: None,
            tolerance,
            pass,
            note: None,
        });
        pass
    }

    /// Passes when `|value - expected| ≤ tolerance`.
    pub fn compare(
        &mut self,
        name: impl Into<String>,
        value: f64,
        expected: f64,
        tolerance: f64,
    ) -> bool {
        let pass = (value - expected).abs() <= tolerance;
        self.push(Measurement {
            name: name.into(),
            value: Some(value),
            expected: Some(expected),
            tolerance,
            pass,
            note: None,
        });
        pass
    }

    /// A yes/no outcome judged at `tolerance`.
    pub fn outcome(
        &mut self,
        name: impl Into<String>,
        pass: bool,
        tolerance: f64,
        note: impl Into<String>,
    ) -> bool {
        self.push(Measurement {
            name: name.into(),
            value: None,
            expected: None,
            tolerance,
            pass,
            note: Some(note.into()),
        });
        pass
    }

    /// A check whose computation raised an error.
    pub fn error(&mut self, name: impl Into<String>, tolerance: f64, err: &crate::error::Error) {
        self.outcome(name, false, tolerance, err.to_string());
    }

    pub fn data(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("report data serializes");
        self.data.insert(key.to_string(), value);
    }

    pub fn judged<T: Serialize>(&mut self, key: &str, value: T, tolerance: f64, pass: bool) {
        self.data(
            key,
            Judged {
                value,
                tolerance,
                pass,
            },
        );
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.summary.push(text.into());
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "altquant {}  seed={}  instances={}",
            self.command, self.seed, self.instances
        );
        for line in &self.summary {
            let _ = writeln!(out, "  {line}");
        }
        for m in &self.checks {
            let verdict = if m.pass { "PASS" } else { "FAIL" };
            let value = match (m.value, m.expected) {
                (Some(v), Some(e)) => format!("{v:.6e} (expected {e:.6e})"),
                (Some(v), None) => format!("{v:.3e}"),
                (None, _) => "-".to_string(),
            };
            let _ = write!(
                out,
                "  {verdict}  {}  {value}  tol={:.0e}",
                m.name, m.tolerance
            );
            if let Some(note) = &m.note {
                let _ = write!(out, "  [{note}]");
            }
            out.push('\n');
        }
        match &self.first_failure {
            None => {
                let _ = writeln!(out, "result: PASS ({} checks)", self.checks.len());
            }
            Some(name) => {
                let _ = writeln!(out, "result: FAIL (first failing check: {name})");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_failure_is_recorded() {
        let mut r = Report::new("x", 1, 0, Value::Null);
        assert!(r.residual("a", 1e-13, 1e-12));
        assert!(!r.compare("b", 1.0, 2.0, 0.5));
        assert!(!r.residual("c", f64::NAN, 1.0));
        assert_eq!(r.first_failure.as_deref(), Some("b"));
        assert_eq!(r.exit_code(), 1);
        assert!(r.to_text().contains("first failing check: b"));
        // NaN serializes as null
        assert!(r.to_json().contains("\"value\": null"));
    }

    #[test]
    fn passing_report() {
        let mut r = Report::new("x", 1, 0, Value::Null);
        r.outcome("ok", true, 1e-9, "fine");
        r.judged("v", 3.0, 1e-9, true);
        assert_eq!(r.exit_code(), 0);
        assert!(r.first_failure.is_none());
        assert!(r.to_json().contains("\"tolerance\": 1e-9"));
    }
}
