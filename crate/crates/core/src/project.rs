//! Projects as right-continuous step functions.
//!
//! A project is a finite list of dated net cash flows. Its balance at `t` is
//! the sum of all amounts dated at or before `t`, so the balance is constant
//! between consecutive event times and jumps at each event. Every pointwise
//! question (ordering, sign) is therefore decided on the finite grid of event
//! times, plus the stretch before the first event where the balance is zero.
//!
//! Projects are kept in a canonical form: sorted by time, one event per time,
//! no zero amounts. Two projects have the same balance function iff they are
//! equal as values.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::time::ExtendedTime;

/// One dated net cash flow; positive amounts are inflows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub time: Rational,
    pub amount: Rational,
}

impl Event {
    pub fn new(time: Rational, amount: Rational) -> Self {
        Event { time, amount }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Project {
    events: Vec<Event>,
}

/// Half-open interval `[start, end)`; `end` may be `+inf`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "rational::as_string")]
    pub start: Rational,
    pub end: ExtendedTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassTag {
    Zero,
    Nonnegative,
    P0,
    P2,
    P1,
    General,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassTag::Zero => "ZERO",
            ClassTag::Nonnegative => "NONNEGATIVE",
            ClassTag::P0 => "P0",
            ClassTag::P2 => "P2",
            ClassTag::P1 => "P1",
            ClassTag::General => "GENERAL",
        })
    }
}

/// Structural class of a project. `phase_switch` is the time at which a
/// conventional (P0/P2) balance turns nonnegative for good.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectClass {
    pub tag: ClassTag,
    #[serde(default, with = "rational::opt_as_string", skip_serializing_if = "Option::is_none")]
    pub phase_switch: Option<Rational>,
}

impl Project {
    pub fn zero() -> Self {
        Project::default()
    }

    /// Builds the canonical project for a raw list of `(time, amount)` pairs:
    /// same-time amounts are summed, zero net amounts dropped, events sorted.
    pub fn new<I>(raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (time, amount) in raw {
            if time.is_negative() {
                return Err(Error::NegativeTime(time));
            }
            *merged.entry(time).or_insert_with(Rational::zero) += amount;
        }
        Ok(Project::from_sorted_map(merged))
    }

    fn from_sorted_map(merged: BTreeMap<Rational, Rational>) -> Self {
        let events = merged
            .into_iter()
            .filter(|(_, amount)| !amount.is_zero())
            .map(|(time, amount)| Event { time, amount })
            .collect();
        Project { events }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    #[allow(clippy::len_without_is_empty)] // `is_zero` plays that role
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_zero(&self) -> bool {
        self.events.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = &Rational> + '_ {
        self.events.iter().map(|e| &e.time)
    }

    pub fn last_time(&self) -> Option<&Rational> {
        self.events.last().map(|e| &e.time)
    }

    /// Balance `x(t)`: the sum of amounts dated at or before `t`.
    pub fn evaluate(&self, t: &Rational) -> Result<Rational> {
        if t.is_negative() {
            return Err(Error::NegativeTime(t.clone()));
        }
        Ok(self.balance_at(t))
    }

    pub(crate) fn balance_at(&self, t: &Rational) -> Rational {
        self.events
            .iter()
            .take_while(|e| &e.time <= t)
            .fold(Rational::zero(), |acc, e| acc + &e.amount)
    }

    /// `(time, balance at time)` for each event, i.e. the running prefix sums.
    pub fn balances(&self) -> Vec<(Rational, Rational)> {
        let mut running = Rational::zero();
        self.events
            .iter()
            .map(|e| {
                running += &e.amount;
                (e.time.clone(), running.clone())
            })
            .collect()
    }

    /// Balance after the last event; zero for the zero project.
    pub fn terminal_value(&self) -> Rational {
        self.events.iter().fold(Rational::zero(), |acc, e| acc + &e.amount)
    }

    pub fn scale(&self, factor: &Rational) -> Project {
        if factor.is_zero() {
            return Project::zero();
        }
        let events = self
            .events
            .iter()
            .map(|e| Event { time: e.time.clone(), amount: &e.amount * factor })
            .collect();
        Project { events }
    }

    /// Multiplies each amount by a time-dependent factor, keeping times.
    pub fn map_amounts<F>(&self, mut f: F) -> Project
    where
        F: FnMut(&Event) -> Rational,
    {
        let merged = self
            .events
            .iter()
            .map(|e| (e.time.clone(), f(e)))
            .collect::<BTreeMap<_, _>>();
        Project::from_sorted_map(merged)
    }

    /// True iff `self ⪯ other`: `self(t) <= other(t)` at every `t >= 0`.
    pub fn is_dominated_by(&self, other: &Project) -> bool {
        let gap = other - self;
        gap.balances().iter().all(|(_, b)| !b.is_negative())
    }

    /// Maximal intervals on which the balance is strictly negative, in order.
    pub fn negative_set(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        let mut open: Option<Rational> = None;
        for (time, balance) in self.balances() {
            match (&open, balance.is_negative()) {
                (None, true) => open = Some(time),
                (Some(_), false) => {
                    let start = open.take().unwrap();
                    out.push(Interval { start, end: ExtendedTime::Finite(time) });
                }
                _ => {}
            }
        }
        if let Some(start) = open {
            out.push(Interval { start, end: ExtendedTime::Infinite });
        }
        out
    }

    /// Event times at which the balance goes from negative (just before) to
    /// nonnegative (at the event).
    pub fn breakeven_points(&self) -> Vec<Rational> {
        let mut prev_negative = false;
        let mut out = Vec::new();
        for (time, balance) in self.balances() {
            let negative = balance.is_negative();
            if prev_negative && !negative {
                out.push(time);
            }
            prev_negative = negative;
        }
        out
    }

    /// Exactly two events `(0, -a)` and `(τ, b)` with `0 < a <= b`, `τ > 0`.
    pub fn in_p0(&self) -> bool {
        match self.events.as_slice() {
            [first, second] => {
                first.time.is_zero()
                    && first.amount.is_negative()
                    && second.time.is_positive()
                    && second.amount >= -&first.amount
            }
            _ => false,
        }
    }

    /// Negative at 0, nondecreasing, nonnegative from some finite time on.
    pub fn in_p1(&self) -> bool {
        match self.events.split_first() {
            Some((first, rest)) => {
                first.time.is_zero()
                    && first.amount.is_negative()
                    && rest.iter().all(|e| e.amount.is_positive())
                    && !self.terminal_value().is_negative()
            }
            None => false,
        }
    }

    /// Negative on `[0, τ)` and nonnegative on `[τ, ∞)` for some `τ > 0`;
    /// returns that `τ`.
    pub fn p2_switch(&self) -> Option<Rational> {
        match self.negative_set().as_slice() {
            [Interval { start, end: ExtendedTime::Finite(end) }] if start.is_zero() => Some(end.clone()),
            _ => None,
        }
    }

    pub fn in_p2(&self) -> bool {
        self.p2_switch().is_some()
    }

    /// Most specific class, with precedence ZERO > NONNEGATIVE > P0 > P2 >
    /// P1 > GENERAL. Every P1 project is also P2, so `P1` is never the
    /// reported tag; use [`Project::in_p1`] for membership.
    pub fn classify(&self) -> ProjectClass {
        let tag_only = |tag| ProjectClass { tag, phase_switch: None };
        if self.is_zero() {
            return tag_only(ClassTag::Zero);
        }
        if self.negative_set().is_empty() {
            return tag_only(ClassTag::Nonnegative);
        }
        if let Some(switch) = self.p2_switch() {
            let tag = if self.in_p0() { ClassTag::P0 } else { ClassTag::P2 };
            return ProjectClass { tag, phase_switch: Some(switch) };
        }
        if self.in_p1() {
            return tag_only(ClassTag::P1);
        }
        tag_only(ClassTag::General)
    }

    /// Evaluation grid covering every constant piece of the balance: 0, each
    /// event time, midpoints between consecutive grid points, and one unit
    /// past the last event.
    pub fn grid(&self) -> Vec<Rational> {
        let mut points: Vec<Rational> = std::iter::once(Rational::zero())
            .chain(self.times().cloned())
            .collect();
        points.dedup();
        let mut grid = Vec::with_capacity(points.len() * 2 + 1);
        for pair in points.windows(2) {
            grid.push(pair[0].clone());
            grid.push((&pair[0] + &pair[1]) / rational::int(2));
        }
        let last = points.last().cloned().unwrap_or_default();
        grid.push(last.clone());
        grid.push(last + Rational::one());
        grid
    }
}

impl Add for &Project {
    type Output = Project;

    fn add(self, other: &Project) -> Project {
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        for e in self.events.iter().chain(&other.events) {
            *merged.entry(e.time.clone()).or_insert_with(Rational::zero) += &e.amount;
        }
        Project::from_sorted_map(merged)
    }
}

impl Add for Project {
    type Output = Project;

    fn add(self, other: Project) -> Project {
        &self + &other
    }
}

impl Neg for &Project {
    type Output = Project;

    fn neg(self) -> Project {
        self.scale(&-Rational::one())
    }
}

impl Sub for &Project {
    type Output = Project;

    fn sub(self, other: &Project) -> Project {
        self + &(-other)
    }
}

impl fmt::Display for Project {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        f.write_str("[")?;
        for (i, e) in self.events.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({}, {})", e.time, e.amount)?;
        }
        f.write_str("]")
    }
}

/// Serialized as `[["time", "amount"], ...]` with exact rational strings.
impl Serialize for Project {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.events.len()))?;
        for e in &self.events {
            seq.serialize_element(&[e.time.to_string(), e.amount.to_string()])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Project {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let pairs = Vec::<(String, String)>::deserialize(deserializer)?;
        let raw = pairs
            .iter()
            .map(|(t, c)| Ok((rational::parse_rational(t)?, rational::parse_rational(c)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Project::new(raw).map_err(D::Error::custom)
    }
}
