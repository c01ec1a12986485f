//! Payback-period metrics.
//!
//! [`payback`] is the last break-even point: the earliest time after which
//! the balance never goes negative again (`inf` if the balance ends
//! negative). It is the only definition satisfying two-transaction
//! compliance, aggregation consistency and monotonicity together.
//!
//! Two independent oracles compute the same value by different routes:
//! [`payback_oracle_dominance`] takes the infimum of times `τ` at which some
//! outlay-then-inflow project `-a·1_0 + b·1_τ` (with `a <= b`) lies below
//! `x`, and [`payback_oracle_grid`] brute-forces the balance on a grid.
//!
//! The rival definitions, [`first_breakeven`] and [`modified_payback`], are
//! kept for comparison; each breaks one of the axioms.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::discount::{default_sign_tolerance, DiscountFunction};
use crate::error::{Error, Result};
use crate::project::{Interval, Project};
use crate::rational::{self, Rational};
use crate::time::ExtendedTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MetricKind {
    LastBreakeven,
    FirstBreakeven,
    Modified,
    DiscountedLast,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::LastBreakeven,
        MetricKind::FirstBreakeven,
        MetricKind::Modified,
        MetricKind::DiscountedLast,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::LastBreakeven => "LAST_BREAKEVEN",
            MetricKind::FirstBreakeven => "FIRST_BREAKEVEN",
            MetricKind::Modified => "MODIFIED",
            MetricKind::DiscountedLast => "DISCOUNTED_LAST",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "last" | "last_breakeven" => Ok(MetricKind::LastBreakeven),
            "first" | "first_breakeven" => Ok(MetricKind::FirstBreakeven),
            "modified" => Ok(MetricKind::Modified),
            "discounted" | "discounted_last" => Ok(MetricKind::DiscountedLast),
            other => Err(format!("unknown metric `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricReport {
    pub kind: MetricKind,
    pub value: ExtendedTime,
    #[serde(with = "rational::vec_as_string")]
    pub breakeven_points: Vec<Rational>,
    pub acceptable: Option<bool>,
}

pub fn payback(x: &Project) -> ExtendedTime {
    if x.terminal_value().is_negative() {
        return ExtendedTime::Infinite;
    }
    match x.negative_set().last() {
        None => ExtendedTime::zero(),
        Some(Interval { end, .. }) => end.clone(),
    }
}

/// [`payback`] with balances in `[-tolerance, 0)` treated as nonnegative.
pub fn payback_with_tolerance(x: &Project, tolerance: &Rational) -> ExtendedTime {
    let floor = -tolerance;
    let balances = x.balances();
    match balances.iter().rposition(|(_, b)| b < &floor) {
        None => ExtendedTime::zero(),
        Some(i) if i + 1 == balances.len() => ExtendedTime::Infinite,
        Some(i) => ExtendedTime::Finite(balances[i + 1].0.clone()),
    }
}

/// Infimum of `τ > 0` such that `-a·1_0 + b·1_τ ⪯ x` for some `0 < a <= b`.
///
/// Feasibility is constant between grid points, so the infimum is taken
/// over [`Project::grid`]; each feasible candidate is certified by building
/// the witness with `a = b = max(1, -min balance on [0, τ)) + 1` and checking
/// dominance directly.
pub fn payback_oracle_dominance(x: &Project) -> ExtendedTime {
    let candidates: Vec<Rational> = x.grid().into_iter().filter(|t| t.is_positive()).collect();
    let feasible: Vec<bool> = candidates.iter().map(|tau| dominance_feasible(x, tau)).collect();
    if feasible.iter().all(|&f| f) {
        return ExtendedTime::zero();
    }
    candidates
        .iter()
        .zip(&feasible)
        .filter(|(_, &f)| f)
        .map(|(t, _)| t.clone())
        .min()
        .map_or(ExtendedTime::Infinite, ExtendedTime::Finite)
}

fn dominance_feasible(x: &Project, tau: &Rational) -> bool {
    let min_before = x
        .events()
        .iter()
        .filter(|e| &e.time < tau)
        .map(|e| x.balance_at(&e.time))
        .fold(Rational::zero(), |m, b| if b < m { b } else { m });
    let a = std::cmp::max(Rational::one(), -min_before) + Rational::one();
    let Ok(witness) = Project::new([(Rational::zero(), -a.clone()), (tau.clone(), a)]) else {
        return false;
    };
    witness.is_dominated_by(x)
}

/// Brute force: evaluate the balance independently at every grid point and
/// return the first event time after the last negative grid point.
pub fn payback_oracle_grid(x: &Project) -> ExtendedTime {
    let balance = |t: &Rational| -> Rational {
        x.events()
            .iter()
            .filter(|e| &e.time <= t)
            .map(|e| e.amount.clone())
            .sum()
    };
    let grid = x.grid();
    let Some(last_negative) = grid.iter().filter(|t| balance(t).is_negative()).max() else {
        return ExtendedTime::zero();
    };
    x.times()
        .filter(|t| *t > last_negative)
        .min()
        .cloned()
        .map_or(ExtendedTime::Infinite, ExtendedTime::Finite)
}

/// End of the initial negative stretch: 0 if `x(0) >= 0`, otherwise the first
/// time the balance becomes nonnegative, `inf` if it never does.
pub fn first_breakeven(x: &Project) -> ExtendedTime {
    if !x.balance_at(&Rational::zero()).is_negative() {
        return ExtendedTime::zero();
    }
    x.balances()
        .into_iter()
        .find(|(_, b)| !b.is_negative())
        .map_or(ExtendedTime::Infinite, |(t, _)| ExtendedTime::Finite(t))
}

/// First time the cumulative inflow reaches the total outflow, computed on
/// the net-per-time events.
pub fn modified_payback(x: &Project) -> ExtendedTime {
    let outflow: Rational = x
        .events()
        .iter()
        .filter(|e| e.amount.is_negative())
        .map(|e| -&e.amount)
        .sum();
    if outflow.is_zero() {
        return ExtendedTime::zero();
    }
    let mut inflow = Rational::zero();
    for e in x.events().iter().filter(|e| e.amount.is_positive()) {
        inflow += &e.amount;
        if inflow >= outflow {
            return ExtendedTime::Finite(e.time.clone());
        }
    }
    ExtendedTime::Infinite
}

/// The conventional stream `(0, -total outflow)` plus every inflow of `x`,
/// whose payback equals [`modified_payback`].
pub fn modified_stream(x: &Project) -> Project {
    let outflow: Rational = x
        .events()
        .iter()
        .filter(|e| e.amount.is_negative())
        .map(|e| &e.amount)
        .sum();
    let inflows = x
        .events()
        .iter()
        .filter(|e| e.amount.is_positive())
        .map(|e| (e.time.clone(), e.amount.clone()));
    Project::new(std::iter::once((Rational::zero(), outflow)).chain(inflows))
        .expect("times come from a valid project")
}

/// Payback of `x^(α)`. Inexact factors switch sign decisions to
/// [`default_sign_tolerance`].
pub fn discounted_payback(x: &Project, alpha: &DiscountFunction) -> Result<ExtendedTime> {
    let discounted = alpha.apply(x)?;
    Ok(if discounted.exact {
        payback(&discounted.project)
    } else {
        payback_with_tolerance(&discounted.project, &default_sign_tolerance())
    })
}

pub fn breakeven_points(x: &Project) -> Vec<Rational> {
    x.breakeven_points()
}

pub fn metric(x: &Project, kind: MetricKind, alpha: Option<&DiscountFunction>) -> Result<ExtendedTime> {
    match kind {
        MetricKind::LastBreakeven => Ok(payback(x)),
        MetricKind::FirstBreakeven => Ok(first_breakeven(x)),
        MetricKind::Modified => Ok(modified_payback(x)),
        MetricKind::DiscountedLast => {
            let alpha = alpha.ok_or(Error::MissingDiscount(MetricKind::DiscountedLast.as_str()))?;
            discounted_payback(x, alpha)
        }
    }
}

/// Screening against a maximum acceptable payback period; the boundary
/// `value == mapp` is acceptable.
pub fn is_acceptable(
    x: &Project,
    mapp: &Rational,
    kind: MetricKind,
    alpha: Option<&DiscountFunction>,
) -> Result<bool> {
    if !mapp.is_positive() {
        return Err(Error::NonPositiveMapp(mapp.clone()));
    }
    Ok(metric(x, kind, alpha)?.le_rational(mapp))
}

/// Value, break-even points and optional screening verdict for one metric.
/// For the discounted metric the break-even points are those of `x^(α)`.
pub fn report(
    x: &Project,
    kind: MetricKind,
    alpha: Option<&DiscountFunction>,
    mapp: Option<&Rational>,
) -> Result<MetricReport> {
    let value = metric(x, kind, alpha)?;
    let breakeven_points = match (kind, alpha) {
        (MetricKind::DiscountedLast, Some(a)) => a.apply(x)?.project.breakeven_points(),
        _ => x.breakeven_points(),
    };
    let acceptable = mapp.map(|m| is_acceptable(x, m, kind, alpha)).transpose()?;
    Ok(MetricReport { kind, value, breakeven_points, acceptable })
}
