//! Structured check reports shared by every verifier.

use std::fmt;

use serde::Serialize;

use crate::linalg::FieldMatrix;
use crate::symbolic::ScalarField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        })
    }
}

/// Residual size: numerator term count for exact checks, a number otherwise.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Residual {
    Terms(usize),
    Value(f64),
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub status: Status,
    pub residual: Residual,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

const DETAIL_LIMIT: usize = 240;

fn clip(s: String) -> String {
    if s.len() <= DETAIL_LIMIT {
        return s;
    }
    let mut cut = DETAIL_LIMIT;
    while !s.is_char_boundary(cut) {
        cut -= 1;
    }
    format!("{}...", &s[..cut])
}

impl Check {
    /// Exact check from a residual term count.
    pub fn exact(name: impl Into<String>, terms: usize) -> Self {
        Check {
            name: name.into(),
            kind: CheckKind::Exact,
            status: if terms == 0 { Status::Pass } else { Status::Fail },
            residual: Residual::Terms(terms),
            tolerance: None,
            location: None,
            detail: None,
        }
    }

    /// Exact check on a residual field; the polynomial is recorded on failure.
    pub fn exact_field(name: impl Into<String>, residual: &ScalarField) -> Self {
        let mut c = Check::exact(name, residual.term_count());
        if !residual.is_zero() {
            c.detail = Some(clip(residual.to_string()));
        }
        c
    }

    pub fn exact_matrix(name: impl Into<String>, residual: &FieldMatrix) -> Self {
        let mut c = Check::exact(name, residual.term_count());
        if let Some((i, j, f)) = residual.first_nonzero() {
            c.detail = Some(clip(format!("entry ({}, {}): {}", i + 1, j + 1, f)));
        }
        c
    }

    /// Numeric check `value <= tol`; NaN fails.
    pub fn numeric(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            kind: CheckKind::Numeric,
            status: if value <= tol { Status::Pass } else { Status::Fail },
            residual: Residual::Value(value),
            tolerance: Some(tol),
            location: None,
            detail: None,
        }
    }

    /// A boolean condition with no meaningful residual.
    pub fn flag(name: impl Into<String>, kind: CheckKind, ok: bool) -> Self {
        Check {
            name: name.into(),
            kind,
            status: if ok { Status::Pass } else { Status::Fail },
            residual: Residual::None,
            tolerance: None,
            location: None,
            detail: None,
        }
    }

    pub fn error(name: impl Into<String>, msg: impl fmt::Display) -> Self {
        Check {
            name: name.into(),
            kind: CheckKind::Exact,
            status: Status::Error,
            residual: Residual::None,
            tolerance: None,
            location: None,
            detail: Some(clip(msg.to_string())),
        }
    }

    pub fn at(mut self, location: impl Into<String>) -> Self {
        self.location = Some(location.into());
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(clip(detail.into()));
        self
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub task: String,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario_hash: Option<String>,
    pub checks: Vec<Check>,
    pub overall: Status,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(task: impl Into<String>) -> Self {
        Report {
            task: task.into(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            scenario_hash: None,
            checks: Vec::new(),
            overall: Status::Pass,
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        if !check.passed() {
            self.overall = match (self.overall, check.status) {
                (Status::Error, _) | (_, Status::Error) => Status::Error,
                _ => Status::Fail,
            };
        }
        self.checks.push(check);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        let note = note.into();
        if !self.notes.contains(&note) {
            self.notes.push(note);
        }
    }

    /// Appends another report's checks, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            if !prefix.is_empty() {
                c.name = format!("{prefix}/{}", c.name);
            }
            self.push(c);
        }
        for n in other.notes {
            self.note(n);
        }
    }

    pub fn passed(&self) -> bool {
        self.overall.is_pass()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("task: {}\n", self.task);
        if let Some(h) = &self.scenario_hash {
            out.push_str(&format!("scenario: {h}\n"));
        }
        for c in &self.checks {
            let res = match &c.residual {
                Residual::Terms(n) => format!("terms={n}"),
                Residual::Value(v) => format!("value={v:.3e}"),
                Residual::None => String::new(),
            };
            let tol = c.tolerance.map(|t| format!(" tol={t:e}")).unwrap_or_default();
            out.push_str(&format!("[{}] {} {}{}", c.status, c.name, res, tol));
            if let Some(l) = &c.location {
                out.push_str(&format!(" at {l}"));
            }
            out.push('\n');
            if let Some(d) = &c.detail {
                out.push_str(&format!("    {d}\n"));
            }
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out.push_str(&format!("overall: {}\n", self.overall));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_tracks_worst_status() {
        let mut r = Report::new("t");
        r.push(Check::exact("a", 0));
        assert!(r.passed());
        r.push(Check::numeric("b", 1.0, 0.5));
        assert_eq!(r.overall, Status::Fail);
        r.push(Check::error("c", "boom"));
        assert_eq!(r.overall, Status::Error);
        r.push(Check::exact("d", 0));
        assert_eq!(r.overall, Status::Error);
    }

    #[test]
    fn json_field_order_is_stable() {
        let mut r = Report::new("demo");
        r.push(Check::numeric("n", 0.25, 1.0).at("p0"));
        let s = r.to_json();
        let task = s.find("\"task\"").unwrap();
        let checks = s.find("\"checks\"").unwrap();
        let overall = s.find("\"overall\"").unwrap();
        assert!(task < checks && checks < overall);
        assert!(s.contains("\"tolerance\": 1.0"));
    }

    #[test]
    fn nan_fails_numeric() {
        assert!(!Check::numeric("n", f64::NAN, 1.0).passed());
    }
}
