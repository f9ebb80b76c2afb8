//! Verification records and deterministic serialization.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub margin: usize,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64, margin: usize) -> Self {
        // NaN never passes
        let pass = residual <= tol;
        Self { name: name.into(), residual, tol, margin, pass }
    }

    /// A check that compares against a lower bound instead (`value ≥ tol`).
    pub fn at_least(name: impl Into<String>, value: f64, tol: f64, margin: usize) -> Self {
        Self { name: name.into(), residual: value, tol, margin, pass: value >= tol }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), residual: if ok { 0.0 } else { 1.0 }, tol: 0.0, margin: 0, pass: ok }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    pub geometry: String,
    pub params: Value,
    pub checks: Vec<CheckRecord>,
    /// Reported but not gating.
    pub informational: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new(geometry: impl Into<String>, params: Value) -> Self {
        Self { geometry: geometry.into(), params, checks: Vec::new(), informational: Vec::new() }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn check(&mut self, name: impl Into<String>, residual: f64, tol: f64, margin: usize) {
        self.checks.push(CheckRecord::new(name, residual, tol, margin));
    }

    /// Records a fallible residual; an error becomes a failing record carrying the message.
    pub fn check_result(&mut self, name: impl Into<String>, residual: Result<f64>, tol: f64, margin: usize) {
        let name = name.into();
        match residual {
            Ok(r) => self.check(name, r, tol, margin),
            Err(e) => self.checks.push(CheckRecord {
                name: format!("{name} [{e}]"),
                residual: f64::INFINITY,
                tol,
                margin,
                pass: false,
            }),
        }
    }

    pub fn info(&mut self, name: impl Into<String>, residual: f64, tol: f64, margin: usize) {
        self.informational.push(CheckRecord::new(name, residual, tol, margin));
    }

    /// Informational counterpart of `check_result`.
    pub fn info_result(&mut self, name: impl Into<String>, residual: Result<f64>, margin: usize) {
        let name = name.into();
        match residual {
            Ok(r) => self.info(name, r, DEFAULT_TOL, margin),
            Err(e) => self.info(format!("{name} [{e}]"), f64::INFINITY, DEFAULT_TOL, margin),
        }
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.informational.extend(other.informational);
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().chain(self.informational.iter()).find(|c| c.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> Value {
        let rec = |c: &CheckRecord| {
            json!({
                "name": c.name,
                "residual": finite_or_string(c.residual),
                "tol": c.tol,
                "margin": c.margin,
                "pass": c.pass,
            })
        };
        json!({
            "geometry": self.geometry,
            "params": self.params,
            "checks": self.checks.iter().map(rec).collect::<Vec<_>>(),
            "informational": self.informational.iter().map(rec).collect::<Vec<_>>(),
            "pass": self.pass(),
        })
    }
}

fn finite_or_string(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(format!("{x}"))
    }
}

/// Pretty JSON with keys sorted (serde_json's default map is ordered).
pub fn to_sorted_json_string(v: &Value) -> String {
    let sorted: Value = serde_json::from_str(&v.to_string()).expect("valid JSON roundtrip");
    serde_json::to_string_pretty(&sorted).expect("serializable") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_pass_is_conjunction() {
        let mut r = VerificationReport::new("t", json!({}));
        r.check("a", 1e-12, 1e-10, 1);
        assert!(r.pass());
        r.check("b", f64::NAN, 1e-10, 1);
        assert!(!r.pass());
        r.info("c", 5.0, 1e-10, 0);
        assert_eq!(r.failures().len(), 1);
    }

    #[test]
    fn json_keys_sorted() {
        let mut r = VerificationReport::new("t", json!({"z": 1, "a": 2}));
        r.check("x", 0.0, 1e-10, 2);
        let s = to_sorted_json_string(&r.to_json());
        let a = s.find("\"a\"").unwrap();
        let z = s.find("\"z\"").unwrap();
        assert!(a < z);
        assert!(s.find("\"checks\"").unwrap() < s.find("\"geometry\"").unwrap());
    }
}
