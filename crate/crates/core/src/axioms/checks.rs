use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::discount::DiscountFunction;
use crate::error::{Error, Result};
use crate::project::Project;
use crate::rational::{self, int, Rational};
use crate::time::ExtendedTime;

use super::canned;
use super::generate::{
    gen_dominated_pair_with, gen_project_with, positive_rational, rng_from_seed, unit_fraction, GenParams, HarnessRng,
};
use super::{Axiom, AxiomReport, PaybackFunctional, Witness};

pub const MAX_STORED_WITNESSES: usize = 16;

const LSC_SAMPLES_PER_DELTA: usize = 32;

fn require_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    Ok(())
}

fn two_transaction(a: &Rational, b: &Rational, tau: &Rational) -> Project {
    Project::new([(Rational::zero(), -a.clone()), (tau.clone(), b.clone())]).expect("tau is positive")
}

fn comp_trial(
    f: &PaybackFunctional,
    report: &mut AxiomReport,
    a: &Rational,
    b: &Rational,
    tau: &Rational,
    relation: &str,
) -> Result<()> {
    report.trials += 1;
    let x = two_transaction(a, b, tau);
    let observed = f.apply(&x)?;
    if observed != ExtendedTime::Finite(tau.clone()) {
        report.record(
            Witness::new(vec![("x", x)], vec![observed], relation)
                .with_param("a", a.clone())
                .with_param("b", b.clone())
                .with_param("tau", tau.clone()),
        );
    }
    Ok(())
}

/// Compliance: `F(-a·1_0 + b·1_τ) = τ` for `0 < a <= b`, `τ > 0`.
pub fn check_comp(f: &PaybackFunctional, trials: usize, seed: u64) -> Result<AxiomReport> {
    require_trials(trials)?;
    let params = GenParams::default();
    let mut rng = rng_from_seed(seed);
    let mut report = AxiomReport::new(Axiom::Comp, f);
    const RELATION: &str = "F(x) = tau for x = -a*1_0 + b*1_tau, 0 < a <= b";
    for (a, b, tau) in canned::comp_witness_triples() {
        comp_trial(f, &mut report, &a, &b, &tau, RELATION)?;
    }
    for _ in 0..trials {
        let tau = positive_rational(&mut rng, &params.time_range, params.max_denominator);
        let b = positive_rational(&mut rng, &params.amount_range, params.max_denominator);
        let a = &b * unit_fraction(&mut rng, params.max_denominator);
        comp_trial(f, &mut report, &a, &b, &tau, RELATION)?;
    }
    Ok(report)
}

fn acons_violated(f: &PaybackFunctional, x: &Project, y: &Project) -> Result<Option<[ExtendedTime; 3]>> {
    let fx = f.apply(x)?;
    let fy = f.apply(y)?;
    let fxy = f.apply(&(x + y))?;
    if fxy > std::cmp::max(fx.clone(), fy.clone()) {
        Ok(Some([fx, fy, fxy]))
    } else {
        Ok(None)
    }
}

/// Aggregation consistency: `F(x + y) <= max(F(x), F(y))`.
pub fn check_acons(f: &PaybackFunctional, trials: usize, seed: u64) -> Result<AxiomReport> {
    require_trials(trials)?;
    let params = GenParams::default();
    let mut rng = rng_from_seed(seed);
    let mut report = AxiomReport::new(Axiom::Acons, f);
    let canned = canned::acons_witness_pairs();
    let canned_len = canned.len();
    let random = (0..trials).map(|_| (gen_project_with(&mut rng, &params), gen_project_with(&mut rng, &params)));
    for (i, (x, y)) in canned.into_iter().chain(random).enumerate() {
        report.trials += 1;
        if acons_violated(f, &x, &y)?.is_none() {
            continue;
        }
        let (x, y) = if i >= canned_len && report.violations.len() < MAX_STORED_WITNESSES {
            let shrunk = shrink(vec![x, y], |v| Ok(acons_violated(f, &v[0], &v[1])?.is_some()))?;
            let mut it = shrunk.into_iter();
            (it.next().unwrap(), it.next().unwrap())
        } else {
            (x, y)
        };
        let [fx, fy, fxy] = acons_violated(f, &x, &y)?.expect("shrinking keeps the violation");
        let sum = &x + &y;
        report.record(Witness::new(
            vec![("x", x), ("y", y), ("x+y", sum)],
            vec![fx, fy, fxy],
            "F(x+y) <= max(F(x), F(y))",
        ));
    }
    Ok(report)
}

fn mon_violated(f: &PaybackFunctional, x: &Project, y: &Project) -> Result<Option<[ExtendedTime; 2]>> {
    if !x.is_dominated_by(y) {
        return Ok(None);
    }
    let fx = f.apply(x)?;
    let fy = f.apply(y)?;
    Ok((fx < fy).then_some([fx, fy]))
}

/// Monotonicity: `x ⪯ y ⇒ F(x) >= F(y)`.
pub fn check_mon(f: &PaybackFunctional, trials: usize, seed: u64) -> Result<AxiomReport> {
    require_trials(trials)?;
    let params = GenParams::default();
    let mut rng = rng_from_seed(seed);
    let mut report = AxiomReport::new(Axiom::Mon, f);
    let canned = canned::mon_witness_pairs();
    let canned_len = canned.len();
    let random = (0..trials).map(|_| gen_dominated_pair_with(&mut rng, &params));
    for (i, (x, y)) in canned.into_iter().chain(random).enumerate() {
        debug_assert!(x.is_dominated_by(&y));
        report.trials += 1;
        if mon_violated(f, &x, &y)?.is_none() {
            continue;
        }
        let (x, y) = if i >= canned_len && report.violations.len() < MAX_STORED_WITNESSES {
            let shrunk = shrink(vec![x, y], |v| Ok(mon_violated(f, &v[0], &v[1])?.is_some()))?;
            let mut it = shrunk.into_iter();
            (it.next().unwrap(), it.next().unwrap())
        } else {
            (x, y)
        };
        let [fx, fy] = mon_violated(f, &x, &y)?.expect("shrinking keeps the violation");
        report.record(Witness::new(vec![("x", x), ("y", y)], vec![fx, fy], "x <= y pointwise implies F(x) >= F(y)"));
    }
    Ok(report)
}

/// How a perturbation radius `δ` bounds the amount changes `Δ_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerturbationNorm {
    /// `|Δ_k| <= δ` for every event independently.
    #[default]
    Independent,
    /// `Σ |Δ_k| <= δ`; every balance moves by at most `δ`.
    TotalVariation,
    /// `|Σ_{j<=k} Δ_j| <= δ` for every `k`: the balance path itself moves by
    /// at most `δ` at each event, in any direction.
    Balance,
}

/// Adds `deltas[k]` to the amount of event `k`, keeping times fixed.
pub fn perturb(x: &Project, deltas: &[Rational]) -> Project {
    Project::new(
        x.events()
            .iter()
            .zip(deltas)
            .map(|(e, d)| (e.time.clone(), &e.amount + d)),
    )
    .expect("times are unchanged")
}

/// Smallest nonzero absolute balance over the event grid; `None` when every
/// balance is zero.
pub fn sign_margin(x: &Project) -> Option<Rational> {
    let balances: Vec<Rational> = x.balances().into_iter().map(|(_, b)| b).collect();
    rational::min_abs_nonzero(&balances)
}

fn signed_unit<R: Rng>(rng: &mut R) -> Rational {
    let den = rng.random_range(1..=64i64);
    Rational::new(BigInt::from(rng.random_range(-den..=den)), BigInt::from(den))
}

/// Extreme perturbations first, then random ones within the radius.
///
/// Under [`PerturbationNorm::Independent`] the all-`+δ` vector raises every
/// balance at least as much as any other admissible vector; under
/// [`PerturbationNorm::TotalVariation`] putting `+δ` on the first event does.
/// For a monotone functional these corners are therefore the worst cases.
/// Under [`PerturbationNorm::Balance`] the adversarial corner lifts every
/// negative balance and lowers every nonnegative one by `δ`.
fn perturbation_vectors(x: &Project, delta: &Rational, norm: PerturbationNorm, rng: &mut HarnessRng) -> Vec<Vec<Rational>> {
    let n = x.len();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    match norm {
        PerturbationNorm::Independent => {
            out.push(vec![delta.clone(); n]);
            out.push(vec![-delta.clone(); n]);
            for _ in 0..LSC_SAMPLES_PER_DELTA {
                out.push((0..n).map(|_| delta * signed_unit(rng)).collect());
            }
        }
        PerturbationNorm::TotalVariation => {
            for k in 0..n {
                for sign in [Rational::one(), -Rational::one()] {
                    let mut v = vec![Rational::zero(); n];
                    v[k] = delta * &sign;
                    out.push(v);
                }
            }
            for _ in 0..LSC_SAMPLES_PER_DELTA {
                let weights: Vec<Rational> = (0..n).map(|_| signed_unit(rng)).collect();
                let total: Rational = weights.iter().map(|w| w.abs()).sum();
                let scale = if total > Rational::one() { delta / total } else { delta.clone() };
                out.push(weights.into_iter().map(|w| w * &scale).collect());
            }
        }
        PerturbationNorm::Balance => {
            let mut paths: Vec<Vec<Rational>> = Vec::new();
            let toward_zero: Vec<Rational> = x
                .balances()
                .into_iter()
                .map(|(_, b)| if b.is_negative() { delta.clone() } else { -delta.clone() })
                .collect();
            paths.push(toward_zero.iter().map(|e| -e).collect());
            paths.push(toward_zero);
            paths.push(vec![delta.clone(); n]);
            paths.push(vec![-delta.clone(); n]);
            for _ in 0..LSC_SAMPLES_PER_DELTA {
                paths.push((0..n).map(|_| delta * signed_unit(rng)).collect());
            }
            for path in paths {
                let mut prev = Rational::zero();
                out.push(
                    path.into_iter()
                        .map(|e| {
                            let step = &e - &prev;
                            prev = e;
                            step
                        })
                        .collect(),
                );
            }
        }
    }
    out
}

/// Lower semicontinuity at one point: with `F(x) > d`, perturb the amounts
/// of `x` within each radius and look for `F <= d`.
///
/// Reports the largest radius under which every sampled perturbation keeps
/// `F > d`, and records a violation only when no tested radius does.
pub fn check_lsc(
    f: &PaybackFunctional,
    x: &Project,
    d: &Rational,
    deltas: &[Rational],
    seed: u64,
    norm: PerturbationNorm,
) -> Result<AxiomReport> {
    let mut report = AxiomReport::new(Axiom::Lsc, f);
    report.largest_stable_delta = lsc_point(f, x, d, deltas, &mut rng_from_seed(seed), norm, &mut report)?;
    Ok(report)
}

fn lsc_point(
    f: &PaybackFunctional,
    x: &Project,
    d: &Rational,
    deltas: &[Rational],
    rng: &mut HarnessRng,
    norm: PerturbationNorm,
    report: &mut AxiomReport,
) -> Result<Option<Rational>> {
    if !d.is_positive() {
        return Err(Error::InvalidArgument(format!("threshold {d} must be positive")));
    }
    if deltas.is_empty() || deltas.iter().any(|delta| !delta.is_positive()) {
        return Err(Error::InvalidArgument("perturbation radii must be positive".into()));
    }
    let fx = f.apply(x)?;
    if fx.le_rational(d) {
        return Err(Error::NotApplicable(format!("F(x) = {fx} is not above d = {d}")));
    }
    report.trials += 1;
    let mut stable: Option<Rational> = None;
    let mut first_failure: Option<(Rational, Project, ExtendedTime)> = None;
    for delta in deltas {
        let mut failure = None;
        for v in perturbation_vectors(x, delta, norm, rng) {
            let moved = perturb(x, &v);
            let fm = f.apply(&moved)?;
            if fm.le_rational(d) {
                failure = Some((delta.clone(), moved, fm));
                break;
            }
        }
        match failure {
            None => {
                if stable.as_ref().is_none_or(|s| delta > s) {
                    stable = Some(delta.clone());
                }
            }
            Some(fail) => {
                if first_failure.is_none() {
                    first_failure = Some(fail);
                }
            }
        }
    }
    if stable.is_none() {
        let (delta, moved, fm) = first_failure.expect("every radius failed");
        report.record(
            Witness::new(vec![("x", x.clone()), ("perturbed", moved)], vec![fx, fm], "F(perturbed) > d")
                .with_param("d", d.clone())
                .with_param("delta", delta),
        );
    }
    Ok(stable)
}

/// The radius used by [`check_lsc_suite`]: just under half the sign margin,
/// divided by the event count for independent perturbations.
pub(crate) fn suite_radius(x: &Project, norm: PerturbationNorm) -> Rational {
    let half = sign_margin(x).unwrap_or_else(Rational::one) / int(2);
    let shrink = rational::ratio(63, 64);
    match norm {
        PerturbationNorm::TotalVariation | PerturbationNorm::Balance => half * shrink,
        PerturbationNorm::Independent => half * shrink / int(x.len().max(1) as i64),
    }
}

/// LSC over generated points: draws projects with `F(x) > 0`, a threshold
/// `d` below `F(x)`, and perturbs at radii below the sign margin. Not
/// applicable when no generated project has positive `F`.
pub fn check_lsc_suite(f: &PaybackFunctional, trials: usize, seed: u64, norm: PerturbationNorm) -> Result<AxiomReport> {
    require_trials(trials)?;
    let params = GenParams::default();
    let mut rng = rng_from_seed(seed);
    let mut report = AxiomReport::new(Axiom::Lsc, f);
    let mut attempts = 0;
    while report.trials < trials && attempts < trials * 20 {
        attempts += 1;
        let x = gen_project_with(&mut rng, &params);
        let d = match f.apply(&x)? {
            ExtendedTime::Infinite => positive_rational(&mut rng, &params.time_range, params.max_denominator),
            ExtendedTime::Finite(v) if v.is_positive() => {
                let u = unit_fraction(&mut rng, params.max_denominator);
                if u.is_one() {
                    v / int(2)
                } else {
                    v * u
                }
            }
            ExtendedTime::Finite(_) => continue,
        };
        let radius = suite_radius(&x, norm);
        let deltas = [radius.clone(), &radius / int(2), &radius / int(4)];
        lsc_point(f, &x, &d, &deltas, &mut rng, norm, &mut report)?;
    }
    if report.trials == 0 {
        return Ok(report.not_applicable());
    }
    Ok(report)
}

/// Times at which `alpha` is known exactly: table keys, integers for the
/// exponential form, anything for the identity.
fn exact_time_grid(alpha: &DiscountFunction, params: &GenParams) -> Option<Vec<Rational>> {
    if let Some(table) = alpha.table_entries() {
        return Some(table.keys().cloned().collect());
    }
    if alpha.rate().is_some() {
        let hi = params.time_range.floor().to_integer().to_i64().unwrap_or(0).max(1);
        return Some((0..=hi).map(int).collect());
    }
    None
}

/// α-compliance: `F(-a·1_0 + b·1_τ) = τ` for `0 < a <= α(τ)·b`, including
/// the boundary `a = α(τ)·b`. Times are drawn where `α` is exact.
pub fn check_alpha_comp(f: &PaybackFunctional, alpha: &DiscountFunction, trials: usize, seed: u64) -> Result<AxiomReport> {
    require_trials(trials)?;
    let params = GenParams::default();
    let mut rng = rng_from_seed(seed);
    let mut report = AxiomReport::new(Axiom::AlphaComp, f);
    let grid: Option<Vec<Rational>> =
        exact_time_grid(alpha, &params).map(|g| g.into_iter().filter(|t| t.is_positive()).collect());
    if matches!(&grid, Some(g) if g.is_empty()) {
        return Ok(report.not_applicable());
    }
    const RELATION: &str = "F(x) = tau for x = -a*1_0 + b*1_tau, 0 < a <= alpha(tau)*b";
    for i in 0..trials {
        let tau = match &grid {
            Some(g) => g[rng.random_range(0..g.len())].clone(),
            None => positive_rational(&mut rng, &params.time_range, params.max_denominator),
        };
        let factor = alpha.factor(&tau)?;
        if !factor.exact {
            return Err(Error::InvalidArgument(format!("discount factor at {tau} is not exact")));
        }
        let b = positive_rational(&mut rng, &params.amount_range, params.max_denominator);
        let cap = &factor.value * &b;
        // every fourth trial sits exactly on the boundary
        let a = if i % 4 == 0 { cap } else { cap * unit_fraction(&mut rng, params.max_denominator) };
        comp_trial(f, &mut report, &a, &b, &tau, RELATION)?;
    }
    Ok(report)
}

/// α-monotonicity: `x^(α) ⪯ y^(α) ⇒ F(x) >= F(y)`. Pairs are generated
/// dominated in discounted space and mapped back through `1/α`.
pub fn check_alpha_mon(f: &PaybackFunctional, alpha: &DiscountFunction, trials: usize, seed: u64) -> Result<AxiomReport> {
    require_trials(trials)?;
    let mut params = GenParams::default();
    params.time_grid = exact_time_grid(alpha, &params);
    let inverse = alpha.invert();
    let mut rng = rng_from_seed(seed);
    let mut report = AxiomReport::new(Axiom::AlphaMon, f);
    for _ in 0..trials {
        report.trials += 1;
        let (dx, dy) = gen_dominated_pair_with(&mut rng, &params);
        let x = inverse.apply(&dx)?.project;
        let y = inverse.apply(&dy)?.project;
        let fx = f.apply(&x)?;
        let fy = f.apply(&y)?;
        if fx < fy {
            report.record(Witness::new(
                vec![("x", x), ("y", y)],
                vec![fx, fy],
                "x^alpha <= y^alpha pointwise implies F(x) >= F(y)",
            ));
        }
    }
    Ok(report)
}

/// Local shrinking: repeatedly drop single events, then round amounts to
/// nonzero integers, while `holds` stays true.
fn shrink<P>(mut inputs: Vec<Project>, holds: P) -> Result<Vec<Project>>
where
    P: Fn(&[Project]) -> Result<bool>,
{
    let mut changed = true;
    while changed {
        changed = false;
        'outer: for i in 0..inputs.len() {
            for j in 0..inputs[i].len() {
                let events = inputs[i].events();
                let candidate = Project::new(
                    events
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .map(|(_, e)| (e.time.clone(), e.amount.clone())),
                )?;
                let mut trial = inputs.clone();
                trial[i] = candidate;
                if holds(&trial)? {
                    inputs = trial;
                    changed = true;
                    break 'outer;
                }
            }
        }
    }
    for i in 0..inputs.len() {
        for j in 0..inputs[i].len() {
            let e = &inputs[i].events()[j];
            let rounded = e.amount.round();
            if rounded.is_zero() || rounded == e.amount {
                continue;
            }
            let candidate = inputs[i].map_amounts(|ev| if ev.time == e.time { rounded.clone() } else { ev.amount.clone() });
            let mut trial = inputs.clone();
            trial[i] = candidate;
            if holds(&trial)? {
                inputs = trial;
            }
        }
    }
    Ok(inputs)
}
