//! End-to-end experiments. Each returns a [`Report`]: the parameters, every
//! inequality evaluated as a [`CertifiedCheck`], raw numbers, and optional
//! CSV rows for plotting.

mod constituents;
mod deletion;
mod lollipop;
mod mangrove;
mod ramanujan;

pub use constituents::{gamma_count, gamma_enumeration_check, walk_transfer_check, GAMMA_BUDGET};
pub use deletion::{deletion_pipeline, DeletionOptions, DeletionParams, DeletionVariant};
pub use lollipop::lollipop_report;
pub use mangrove::{mangrove_quotient, mangrove_report, QuotientModel};
pub use ramanujan::{is_bipartite, ramanujan_trace_bound};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::certificate::{CertifiedCheck, Verdict};

/// Plot-ready table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: String,
    pub params: Map<String, Value>,
    pub checks: Vec<CertifiedCheck>,
    pub data: Map<String, Value>,
    #[serde(skip)]
    pub csv: Option<Csv>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Report { experiment: experiment.to_string(), params: Map::new(), checks: Vec::new(), data: Map::new(), csv: None }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), to_value(value));
        self
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(key.to_string(), to_value(value));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(CertifiedCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CertifiedCheck> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&CertifiedCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        to_value(self)
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}
