#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::Signed;
use payback_core::{ExtendedTime, Project, Rational};
use proptest::prelude::*;

pub fn r(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn p(events: &[(i64, i64)]) -> Project {
    Project::new(events.iter().map(|&(t, c)| (r(t, 1), r(c, 1)))).unwrap()
}

pub fn fin(v: i64) -> ExtendedTime {
    ExtendedTime::Finite(r(v, 1))
}

/// Raw `(time, amount)` pairs: times in [0, 20], amounts in [-100, 100],
/// denominators up to 64, duplicates and zero amounts allowed.
pub fn raw_events(max_len: usize) -> impl Strategy<Value = Vec<(Rational, Rational)>> {
    let time = (0i64..=1280, 1i64..=64).prop_map(|(n, d)| r(n % (20 * d + 1), d));
    let small_time = (0i64..=20).prop_map(|n| r(n, 1));
    let amount = (-6400i64..=6400, 1i64..=64).prop_map(|(n, d)| r(n % (100 * d + 1), d));
    prop::collection::vec((prop_oneof![time, small_time], amount), 0..=max_len)
}

pub fn project(max_len: usize) -> impl Strategy<Value = Project> {
    raw_events(max_len).prop_map(|raw| Project::new(raw).unwrap())
}

/// Nonnegative-balance project: inflows plus inflow-then-smaller-outflow pairs.
pub fn nonnegative(max_pieces: usize) -> impl Strategy<Value = Project> {
    let piece = (0i64..=20, 0i64..=20, 1i64..=100, 0i64..=64, any::<bool>());
    prop::collection::vec(piece, 0..=max_pieces).prop_map(|pieces| {
        let mut raw = Vec::new();
        for (t1, t2, c, frac, paired) in pieces {
            let (early, late) = (t1.min(t2), t1.max(t2));
            raw.push((r(early, 2), r(c, 1)));
            if paired {
                raw.push((r(late, 2), -r(c * frac, 64)));
            }
        }
        Project::new(raw).unwrap()
    })
}

/// Independent balance evaluation: sum of raw amounts dated at or before t.
pub fn naive_balance(raw: &[(Rational, Rational)], t: &Rational) -> Rational {
    raw.iter().filter(|(time, _)| time <= t).map(|(_, c)| c.clone()).sum()
}

/// Every constant piece of a step function with jumps at `times`: the jump
/// points, midpoints, a point before the first jump and one past the last.
pub fn sample_points<'a>(times: impl IntoIterator<Item = &'a Rational>) -> Vec<Rational> {
    let mut ts: Vec<Rational> = times.into_iter().cloned().collect();
    ts.push(r(0, 1));
    ts.sort();
    ts.dedup();
    let mut out = ts.clone();
    for w in ts.windows(2) {
        out.push((&w[0] + &w[1]) / r(2, 1));
    }
    out.push(ts.last().unwrap() + r(1, 1));
    out.sort();
    out.dedup();
    out
}

/// Brute-force `inf{τ >= 0 : x(t) >= 0 for all t >= τ}` over sample points.
pub fn brute_payback(x: &Project) -> ExtendedTime {
    let raw: Vec<(Rational, Rational)> = x.events().iter().map(|e| (e.time.clone(), e.amount.clone())).collect();
    let pts = sample_points(x.times());
    let Some(last_neg) = pts.iter().filter(|t| naive_balance(&raw, t).is_negative()).max().cloned() else {
        return ExtendedTime::Finite(r(0, 1));
    };
    let jumps: Vec<&Rational> = raw.iter().map(|(t, _)| t).filter(|t| **t > last_neg).collect();
    jumps.into_iter().min().cloned().map_or(ExtendedTime::Infinite, ExtendedTime::Finite)
}

/// Brute-force P1 membership: negative at 0, nondecreasing across sample
/// points, nonnegative past the last event.
pub fn brute_in_p1(x: &Project) -> bool {
    let raw: Vec<(Rational, Rational)> = x.events().iter().map(|e| (e.time.clone(), e.amount.clone())).collect();
    let pts = sample_points(x.times());
    let values: Vec<Rational> = pts.iter().map(|t| naive_balance(&raw, t)).collect();
    values[0].is_negative()
        && values.windows(2).all(|w| w[0] <= w[1])
        && !values.last().unwrap().is_negative()
}

/// Brute-force `x ⪯ y` over the merged sample points.
pub fn brute_dominated(x: &Project, y: &Project) -> bool {
    let rx: Vec<(Rational, Rational)> = x.events().iter().map(|e| (e.time.clone(), e.amount.clone())).collect();
    let ry: Vec<(Rational, Rational)> = y.events().iter().map(|e| (e.time.clone(), e.amount.clone())).collect();
    let pts = sample_points(x.times().chain(y.times()));
    pts.iter().all(|t| naive_balance(&rx, t) <= naive_balance(&ry, t))
}
