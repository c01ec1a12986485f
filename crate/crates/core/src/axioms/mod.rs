//! Falsification harness for payback functionals.
//!
//! Each check treats a [`PaybackFunctional`] as a black box, feeds it seeded
//! random inputs plus a few canned inputs, and records every input on which
//! the axiom fails as a replayable [`Witness`]. A violation is a proof that
//! the axiom fails; a clean report is only evidence that it holds.

mod canned;
mod checks;
mod functional;
pub mod generate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::project::Project;
use crate::rational::{self, Rational};
use crate::time::ExtendedTime;

pub use canned::{acons_witness_pairs, comp_witness_triples, mon_witness_pairs};
pub use checks::{
    check_acons, check_alpha_comp, check_alpha_mon, check_comp, check_lsc, check_lsc_suite, check_mon,
    perturb, sign_margin, PerturbationNorm, MAX_STORED_WITNESSES,
};
pub use functional::{builtin, Builtin, Expectation, PaybackFunctional};
pub use generate::{gen_dominated_pair, gen_project, GenParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Axiom {
    Comp,
    Acons,
    Mon,
    Lsc,
    AlphaComp,
    AlphaMon,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [Axiom::Comp, Axiom::Acons, Axiom::Mon, Axiom::Lsc, Axiom::AlphaComp, Axiom::AlphaMon];

    pub fn as_str(self) -> &'static str {
        match self {
            Axiom::Comp => "COMP",
            Axiom::Acons => "ACONS",
            Axiom::Mon => "MON",
            Axiom::Lsc => "LSC",
            Axiom::AlphaComp => "ALPHA_COMP",
            Axiom::AlphaMon => "ALPHA_MON",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Axiom::ALL
            .into_iter()
            .find(|a| a.as_str() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown axiom `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledProject {
    pub label: String,
    pub project: Project,
}

/// A concrete input on which an axiom failed. `observed[i]` is the
/// functional's value on `inputs[i]`, so the record can be replayed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub inputs: Vec<LabeledProject>,
    #[serde(with = "params_as_strings")]
    pub params: BTreeMap<String, Rational>,
    pub observed: Vec<ExtendedTime>,
    pub expected_relation: String,
}

impl Witness {
    pub(crate) fn new(inputs: Vec<(&str, Project)>, observed: Vec<ExtendedTime>, relation: impl Into<String>) -> Self {
        Witness {
            inputs: inputs
                .into_iter()
                .map(|(label, project)| LabeledProject { label: label.to_string(), project })
                .collect(),
            params: BTreeMap::new(),
            observed,
            expected_relation: relation.into(),
        }
    }

    pub(crate) fn with_param(mut self, key: &str, value: Rational) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn input(&self, label: &str) -> Option<&Project> {
        self.inputs.iter().find(|i| i.label == label).map(|i| &i.project)
    }

    /// Re-evaluates `f` on the stored inputs and compares with `observed`.
    pub fn replays(&self, f: &PaybackFunctional) -> Result<bool> {
        if self.inputs.len() != self.observed.len() {
            return Ok(false);
        }
        for (input, observed) in self.inputs.iter().zip(&self.observed) {
            if &f.apply(&input.project)? != observed {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

mod params_as_strings {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(map: &BTreeMap<String, Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(map.iter().map(|(k, v)| (k, v.to_string())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<String, Rational>, D::Error> {
        BTreeMap::<String, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| Ok((k, rational::parse_rational(&v).map_err(serde::de::Error::custom)?)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReportStatus {
    Pass,
    Violated,
    NotApplicable,
}

impl fmt::Display for ReportStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportStatus::Pass => "PASS",
            ReportStatus::Violated => "VIOLATED",
            ReportStatus::NotApplicable => "NOT-APPLICABLE",
        })
    }
}

/// Outcome of one axiom suite. At most [`MAX_STORED_WITNESSES`] witnesses
/// are kept; `violation_count` counts all of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub functional: String,
    pub trials: usize,
    pub violation_count: usize,
    pub violations: Vec<Witness>,
    pub status: ReportStatus,
    /// LSC only: largest tested radius under which no sampled perturbation
    /// brought the functional down to the threshold.
    #[serde(default, with = "rational::opt_as_string", skip_serializing_if = "Option::is_none")]
    pub largest_stable_delta: Option<Rational>,
}

impl AxiomReport {
    pub(crate) fn new(axiom: Axiom, functional: &PaybackFunctional) -> Self {
        AxiomReport {
            axiom,
            functional: functional.name().to_string(),
            trials: 0,
            violation_count: 0,
            violations: Vec::new(),
            status: ReportStatus::Pass,
            largest_stable_delta: None,
        }
    }

    pub(crate) fn record(&mut self, witness: Witness) {
        self.violation_count += 1;
        self.status = ReportStatus::Violated;
        if self.violations.len() < MAX_STORED_WITNESSES {
            self.violations.push(witness);
        }
    }

    pub(crate) fn not_applicable(mut self) -> Self {
        self.status = ReportStatus::NotApplicable;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == ReportStatus::Pass
    }
}
