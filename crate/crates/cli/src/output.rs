//! Report shapes shared by the text and JSON renderers.
//!
//! Every rational is serialized as an exact `"p/q"` string, so parsing the
//! JSON back reproduces the values bit for bit.

use std::fmt;

use payback_core::axioms::{AxiomReport, Expectation};
use payback_core::rational;
use payback_core::{ExtendedTime, MetricKind, MetricReport, ProjectClass, Rational};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeOutput {
    pub name: String,
    pub class: ProjectClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discount: Option<String>,
    pub reports: Vec<MetricReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedReport {
    pub name: String,
    pub report: MetricReport,
}

/// One metric over a pool of projects. `max_rule_holds` records whether the
/// pooled value stays at or below the largest individual value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortfolioReport {
    pub metric: MetricKind,
    pub projects: Vec<NamedReport>,
    pub pool: MetricReport,
    pub max_rule_bound: ExtendedTime,
    pub max_rule_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricValue {
    pub kind: MetricKind,
    pub value: ExtendedTime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareOutput {
    pub name: String,
    pub class: ProjectClass,
    #[serde(with = "rational::as_string")]
    pub terminal_value: Rational,
    #[serde(with = "rational::vec_as_string")]
    pub breakeven_points: Vec<Rational>,
    pub metrics: Vec<MetricValue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expected {
    Satisfies,
    Violates,
    Unknown,
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expected::Satisfies => "satisfies",
            Expected::Violates => "violates",
            Expected::Unknown => "unknown",
        })
    }
}

impl From<Expectation> for Expected {
    fn from(e: Expectation) -> Self {
        match e {
            Expectation::Satisfies => Expected::Satisfies,
            Expectation::Violates => Expected::Violates,
            Expectation::Unknown => Expected::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomEntry {
    pub expected: Expected,
    pub report: AxiomReport,
}

impl AxiomEntry {
    /// A violation of an axiom the functional is known to satisfy.
    pub fn is_unexpected_failure(&self) -> bool {
        self.expected == Expected::Satisfies && self.report.violation_count > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomsOutput {
    pub functional: String,
    pub discount: String,
    pub seed: u64,
    pub trials: usize,
    pub results: Vec<AxiomEntry>,
}

pub(crate) fn join(points: &[Rational]) -> String {
    if points.is_empty() {
        return "-".into();
    }
    points.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

pub(crate) fn verdict(acceptable: Option<bool>) -> &'static str {
    match acceptable {
        Some(true) => "  accept",
        Some(false) => "  reject",
        None => "",
    }
}
