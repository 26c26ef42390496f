//! Machine-readable reports. Maps are ordered so identical inputs give
//! byte-identical JSON.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use super::config::RunConfig;
use crate::error::Error;

/// An integer result with every method that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegerInvariant {
    /// The common value; `None` when the methods disagree.
    pub value: Option<i64>,
    pub methods: BTreeMap<String, i64>,
    pub agreement: Agreement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Agree,
    SingleMethod,
    Disagree,
}

impl IntegerInvariant {
    pub fn from_methods<S: Into<String>>(methods: impl IntoIterator<Item = (S, i64)>) -> Self {
        let methods: BTreeMap<String, i64> = methods.into_iter().map(|(k, v)| (k.into(), v)).collect();
        let mut values = methods.values();
        let first = values.next().copied();
        let same = values.all(|v| Some(*v) == first);
        let agreement = match (methods.len(), same) {
            (0 | 1, _) => Agreement::SingleMethod,
            (_, true) => Agreement::Agree,
            (_, false) => Agreement::Disagree,
        };
        IntegerInvariant {
            value: if same { first } else { None },
            methods,
            agreement,
        }
    }
}

/// One named check inside a suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Worst residual, or the number of mismatches for exact checks.
    pub value: f64,
    /// The check passes when `value ≤ limit`.
    pub limit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn new(name: &str, checks: Vec<CheckOutcome>) -> Self {
        SuiteReport {
            name: name.to_string(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = String> + '_ {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(move |c| format!("{}::{}", self.name, c.name))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        let kind = match e {
            Error::NotSquare { .. } => "not_square",
            Error::Shape(_) => "shape",
            Error::NonFinite => "non_finite",
            Error::Structural { .. } => "structural",
            Error::Singularity { .. } => "singularity",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::Capacity { .. } => "capacity",
            Error::Parity { .. } => "parity",
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::Composition(_) => "composition",
            Error::Gapless { .. } => "gapless",
            Error::BulkGapless { .. } => "bulk_gapless",
            Error::Normalization { .. } => "normalization",
            Error::Refinement { .. } => "refinement",
            Error::DegenerateEndpoint { .. } => "degenerate_endpoint",
            Error::Inconsistent { .. } => "inconsistent",
            Error::Verification { .. } => "verification",
        };
        ErrorInfo {
            kind: kind.to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Status {
    pub ok: bool,
    pub suites: Vec<SuiteReport>,
    /// Names of failed checks and disagreeing invariants.
    pub failures: Vec<String>,
    pub error: Option<ErrorInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Version {
    pub toolkit: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inputs {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub inputs: Inputs,
    pub invariants: BTreeMap<String, IntegerInvariant>,
    pub residuals: BTreeMap<String, f64>,
    pub status: Status,
    pub version: Version,
    /// Spectra, profiles and tables backing the invariants.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

impl Report {
    pub fn new(inputs: Inputs) -> Self {
        let seed = inputs.config.seed;
        Report {
            inputs,
            invariants: BTreeMap::new(),
            residuals: BTreeMap::new(),
            status: Status {
                ok: true,
                suites: Vec::new(),
                failures: Vec::new(),
                error: None,
            },
            version: Version {
                toolkit: env!("CARGO_PKG_VERSION").to_string(),
                seed,
            },
            data: None,
        }
    }

    pub fn invariant(&mut self, name: &str, inv: IntegerInvariant) {
        if inv.agreement == Agreement::Disagree {
            self.status.ok = false;
            self.status.failures.push(format!("{name}: methods disagree"));
        }
        self.invariants.insert(name.to_string(), inv);
    }

    pub fn residual(&mut self, name: &str, value: f64) {
        self.residuals.insert(name.to_string(), value);
    }

    pub fn suite(&mut self, suite: SuiteReport) {
        if !suite.passed {
            self.status.ok = false;
            self.status.failures.extend(suite.failures());
        }
        self.status.suites.push(suite);
    }

    pub fn fail(&mut self, error: &Error) {
        self.status.ok = false;
        self.status.error = Some(error.into());
    }

    /// 0 on success, 1 for failed checks, 2 for errors.
    pub fn exit_code(&self) -> i32 {
        match (&self.status.error, self.status.ok) {
            (Some(_), _) => 2,
            (None, true) => 0,
            (None, false) => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Rows for CSV output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

/// Shortest round-tripping decimal form; empty for a missing value.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agreement_states() {
        let a = IntegerInvariant::from_methods([("x", 1), ("y", 1)]);
        assert_eq!((a.value, a.agreement), (Some(1), Agreement::Agree));
        let b = IntegerInvariant::from_methods([("x", 1), ("y", 0)]);
        assert_eq!((b.value, b.agreement), (None, Agreement::Disagree));
        let c = IntegerInvariant::from_methods([("x", 3)]);
        assert_eq!(c.agreement, Agreement::SingleMethod);
    }

    #[test]
    fn csv_quotes_fields() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,\"x,y\"\n");
    }
}
