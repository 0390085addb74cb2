//! Uniform record for one instance of an inequality: both sides, slack and a
//! verdict.

use serde::Serialize;
use serde_json::{Map, Value};

/// Default absolute tolerance on slack.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// A stated range precondition is unmet, or the inequality is trivial.
    Vacuous,
    /// Monte Carlo evidence could not separate the two sides.
    Inconclusive,
}

impl Verdict {
    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }
}

/// Direction of the claimed inequality `lhs ? rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
}

/// Slack is oriented so that a nonnegative value means the claim holds:
/// `lhs - rhs` for `>=`, `rhs - lhs` for `<=`.
#[derive(Debug, Clone, Serialize)]
pub struct CertifiedCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub slack: f64,
    pub tol: f64,
    pub verdict: Verdict,
    pub inputs: Map<String, Value>,
}

impl CertifiedCheck {
    pub fn ge(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::new(name, lhs, rhs, Relation::Ge, DEFAULT_TOL)
    }

    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::new(name, lhs, rhs, Relation::Le, DEFAULT_TOL)
    }

    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, relation: Relation, tol: f64) -> Self {
        let slack = match relation {
            Relation::Ge => lhs - rhs,
            Relation::Le => rhs - lhs,
        };
        let holds = slack >= -tol;
        CertifiedCheck {
            name: name.into(),
            lhs,
            rhs,
            relation,
            slack,
            tol,
            verdict: if holds { Verdict::Pass } else { Verdict::Fail },
            inputs: Map::new(),
        }
    }

    /// Overrides the verdict with an exactly decided outcome (used when both
    /// sides were compared in exact arithmetic).
    pub fn decided(mut self, holds: bool) -> Self {
        self.verdict = if holds { Verdict::Pass } else { Verdict::Fail };
        self
    }

    pub fn with_tol(self, tol: f64) -> Self {
        let mut c = CertifiedCheck::new(self.name, self.lhs, self.rhs, self.relation, tol);
        c.inputs = self.inputs;
        c
    }

    /// Marks the check vacuous when `vacuous` holds; a failing comparison
    /// stays a failure.
    pub fn vacuous_if(mut self, vacuous: bool) -> Self {
        if vacuous && self.verdict == Verdict::Pass {
            self.verdict = Verdict::Vacuous;
        }
        self
    }

    /// Replaces the slack (e.g. one computed in exact arithmetic) and
    /// re-derives the verdict from it.
    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self.verdict = if slack >= -self.tol { Verdict::Pass } else { Verdict::Fail };
        self
    }

    pub fn with_verdict(mut self, verdict: Verdict) -> Self {
        self.verdict = verdict;
        self
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        self.inputs.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::Pass | Verdict::Vacuous)
    }
}
