//! Verification records and suite output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{FockError, Result};
use crate::funcrep::{FnExpr, C64};
use crate::lang::{format_complex, print_function};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Zhuhe,
    Thm1,
    Thm2,
    Nulla,
    Corollary,
    Dera1,
    Example,
    Operator,
    Quadrature,
}

impl Theorem {
    pub fn as_str(self) -> &'static str {
        match self {
            Theorem::Zhuhe => "zhuhe",
            Theorem::Thm1 => "thm1",
            Theorem::Thm2 => "thm2",
            Theorem::Nulla => "nulla",
            Theorem::Corollary => "corollary",
            Theorem::Dera1 => "dera1",
            Theorem::Example => "example",
            Theorem::Operator => "operator",
            Theorem::Quadrature => "quadrature",
        }
    }
}

/// Ordered input map with typed helpers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Inputs(pub BTreeMap<String, Value>);

impl Inputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(mut self, key: &str, v: f64) -> Self {
        self.0.insert(key.to_string(), finite_json(v));
        self
    }

    pub fn int(mut self, key: &str, v: i64) -> Self {
        self.0.insert(key.to_string(), Value::from(v));
        self
    }

    pub fn complex(mut self, key: &str, z: C64) -> Self {
        self.0.insert(key.to_string(), Value::from(format_complex(z)));
        self
    }

    pub fn text(mut self, key: &str, v: impl Into<String>) -> Self {
        self.0.insert(key.to_string(), Value::from(v.into()));
        self
    }

    pub fn function(self, key: &str, f: &FnExpr) -> Self {
        self.text(key, print_function(f))
    }
}

/// JSON has no infinities; out-of-range values are clamped and stay numbers.
fn finite_json(v: f64) -> Value {
    let v = if v.is_nan() { 0.0 } else { v.clamp(f64::MIN, f64::MAX) };
    Value::from(v)
}

fn finite(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(f64::MIN, f64::MAX)
    }
}

/// `lhs/rhs`, with 0/0 = 0 and x/0 clamped to `f64::MAX`. Signed sides
/// (derivatives) keep their sign in the ratio.
pub fn ratio_of(lhs: f64, rhs: f64) -> f64 {
    if rhs != 0.0 {
        finite(lhs / rhs)
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::MAX
    }
}

/// Pass predicates on the ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Predicate {
    /// `ratio ≤ 1 + tol`
    AtMost(f64),
    /// `|ratio − 1| ≤ tol`
    Equals(f64),
    /// `ratio < 1` strictly (with `tol` recorded)
    Below(f64),
}

impl Predicate {
    pub fn tolerance(self) -> f64 {
        match self {
            Predicate::AtMost(t) | Predicate::Equals(t) | Predicate::Below(t) => t,
        }
    }

    pub fn holds(self, ratio: f64) -> bool {
        match self {
            Predicate::AtMost(t) => ratio <= 1.0 + t,
            Predicate::Equals(t) => (ratio - 1.0).abs() <= t,
            Predicate::Below(_) => ratio < 1.0,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Predicate::AtMost(_) => "bound",
            Predicate::Equals(_) => "equality",
            Predicate::Below(_) => "strict",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: Theorem,
    pub inputs: Inputs,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub notes: String,
}

impl VerificationReport {
    /// Builds a report whose `pass` is the predicate evaluated on `lhs/rhs`.
    pub fn check(theorem: Theorem, inputs: Inputs, lhs: f64, rhs: f64, predicate: Predicate, notes: impl Into<String>) -> Self {
        let ratio = ratio_of(lhs, rhs);
        let pass = predicate.holds(ratio);
        let mut notes = notes.into();
        if notes.is_empty() {
            notes = predicate.label().to_string();
        } else {
            notes = format!("{}; {notes}", predicate.label());
        }
        Self {
            theorem,
            inputs,
            lhs: finite(lhs),
            rhs: finite(rhs),
            ratio,
            tolerance: predicate.tolerance(),
            pass,
            notes,
        }
    }

    /// Like [`check`](Self::check) with both sides given as logarithms, so the
    /// ratio survives when either side overflows.
    pub fn check_ln(
        theorem: Theorem,
        inputs: Inputs,
        ln_lhs: f64,
        ln_rhs: f64,
        predicate: Predicate,
        notes: impl Into<String>,
    ) -> Self {
        let mut r = Self::check(theorem, inputs, ln_lhs.exp(), ln_rhs.exp(), predicate, notes);
        if ln_rhs.is_finite() && ln_lhs > f64::NEG_INFINITY {
            r.ratio = finite((ln_lhs - ln_rhs).exp());
            r.pass = predicate.holds(r.ratio);
        }
        r
    }

    /// A record with an externally decided verdict.
    pub fn verdict(
        theorem: Theorem,
        inputs: Inputs,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        pass: bool,
        notes: impl Into<String>,
    ) -> Self {
        Self {
            theorem,
            inputs,
            lhs: finite(lhs),
            rhs: finite(rhs),
            ratio: ratio_of(lhs, rhs),
            tolerance: finite(tolerance),
            pass,
            notes: notes.into(),
        }
    }

    fn sort_key(&self) -> (Theorem, String, String) {
        let inputs = serde_json::to_string(&self.inputs).unwrap_or_default();
        (self.theorem, inputs, self.notes.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<VerificationReport>,
    pub seed: u64,
    pub version: String,
}

impl SuiteReport {
    /// Cases are sorted by a canonical key so output does not depend on
    /// evaluation order.
    pub fn new(suite: impl Into<String>, mut cases: Vec<VerificationReport>, seed: u64) -> Self {
        cases.sort_by_cached_key(|c| c.sort_key());
        Self {
            suite: suite.into(),
            cases,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerificationReport> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| FockError::Internal(e.to_string()))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| FockError::Internal(e.to_string());
        w.write_record(["suite", "theorem", "inputs", "lhs", "rhs", "ratio", "tolerance", "pass", "notes"])
            .map_err(io)?;
        for c in &self.cases {
            let inputs = serde_json::to_string(&c.inputs).map_err(|e| FockError::Internal(e.to_string()))?;
            w.write_record([
                self.suite.as_str(),
                c.theorem.as_str(),
                &inputs,
                &format!("{:?}", c.lhs),
                &format!("{:?}", c.rhs),
                &format!("{:?}", c.ratio),
                &format!("{:?}", c.tolerance),
                if c.pass { "true" } else { "false" },
                &c.notes,
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| FockError::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| FockError::Internal(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let inputs = c
                .inputs
                .0
                .iter()
                .map(|(k, v)| match v {
                    Value::String(s) => format!("{k}={s}"),
                    other => format!("{k}={other}"),
                })
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(
                out,
                "{} {:<10} ratio={:<22.15e} lhs={:.12e} rhs={:.12e} tol={:.1e} [{}] {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.theorem.as_str(),
                c.ratio,
                c.lhs,
                c.rhs,
                c.tolerance,
                inputs,
                c.notes
            );
        }
        let failed = self.failures().count();
        let _ = writeln!(
            out,
            "suite {}: {} cases, {} failed (seed {}, version {})",
            self.suite,
            self.cases.len(),
            failed,
            self.seed,
            self.version
        );
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Text => Ok(self.to_text()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_conventions() {
        assert_eq!(ratio_of(1.0, 2.0), 0.5);
        assert_eq!(ratio_of(0.0, 0.0), 0.0);
        assert_eq!(ratio_of(1.0, 0.0), f64::MAX);
        assert_eq!(ratio_of(-1.0, -2.0), 0.5);
    }

    #[test]
    fn predicates() {
        assert!(Predicate::AtMost(1e-8).holds(1.0 + 5e-9));
        assert!(!Predicate::AtMost(1e-8).holds(1.0 + 5e-8));
        assert!(Predicate::Equals(1e-4).holds(0.99995));
        assert!(!Predicate::Equals(1e-4).holds(0.9));
        assert!(Predicate::Below(0.0).holds(0.9));
        assert!(!Predicate::Below(0.0).holds(1.0));
    }

    #[test]
    fn json_schema_shape() {
        let r = VerificationReport::check(
            Theorem::Thm1,
            Inputs::new().int("n", 2).complex("z", C64::new(0.7, -0.3)).num("p", 2.0),
            1.0,
            2.0,
            Predicate::AtMost(1e-8),
            "",
        );
        let suite = SuiteReport::new("thm1", vec![r], 7);
        let v: Value = serde_json::from_str(&suite.to_json().unwrap()).unwrap();
        assert_eq!(v["suite"], "thm1");
        assert_eq!(v["seed"], 7);
        assert!(v["version"].is_string());
        let case = &v["cases"][0];
        assert_eq!(case["theorem"], "thm1");
        assert_eq!(case["inputs"]["z"], "0.7-0.3i");
        assert_eq!(case["inputs"]["n"], 2);
        assert_eq!(case["ratio"], 0.5);
        assert_eq!(case["pass"], true);
        for key in ["lhs", "rhs", "ratio", "tolerance"] {
            assert!(case[key].is_number(), "{key}");
        }
        assert!(case["notes"].is_string());
    }

    #[test]
    fn canonical_order_and_csv() {
        let mk = |t, n| VerificationReport::check(t, Inputs::new().int("n", n), 1.0, 1.0, Predicate::Equals(1e-9), "");
        let a = SuiteReport::new("all", vec![mk(Theorem::Thm2, 1), mk(Theorem::Thm1, 3), mk(Theorem::Thm1, 1)], 0);
        let b = SuiteReport::new("all", vec![mk(Theorem::Thm1, 1), mk(Theorem::Thm2, 1), mk(Theorem::Thm1, 3)], 0);
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.cases[0].theorem, Theorem::Thm1);
        let csv = a.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("all,thm1,"));
    }

    #[test]
    fn non_finite_values_stay_numbers() {
        let r = VerificationReport::check(Theorem::Zhuhe, Inputs::new().num("x", f64::INFINITY), f64::INFINITY, 0.0, Predicate::AtMost(0.0), "");
        assert!(!r.pass);
        let s = serde_json::to_string(&r).unwrap();
        assert!(!s.contains("null"));
    }
}
