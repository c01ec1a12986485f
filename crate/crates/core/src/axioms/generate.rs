//! Seeded random projects for the falsification suites.
//!
//! Rationals are drawn with bounded denominators so exact arithmetic stays
//! cheap. Signs alternate more often than not, which makes nonconventional
//! balances (several negative stretches) the common case.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::project::Project;
use crate::rational::{int, Rational};

pub type HarnessRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> HarnessRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub max_events: usize,
    /// Times are drawn from `[0, time_range]`.
    pub time_range: Rational,
    /// Amount magnitudes are drawn from `(0, amount_range]`.
    pub amount_range: Rational,
    pub max_denominator: u32,
    /// When set, event times are drawn from this list instead.
    pub time_grid: Option<Vec<Rational>>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_events: 12,
            time_range: int(20),
            amount_range: int(100),
            max_denominator: 64,
            time_grid: None,
        }
    }
}

impl GenParams {
    pub fn with_time_grid(mut self, grid: Vec<Rational>) -> Self {
        self.time_grid = Some(grid);
        self
    }
}

/// Uniform over `{k/den : 0 <= k/den <= hi}` for a random `den <= max_den`.
pub fn rational_in<R: Rng>(rng: &mut R, hi: &Rational, max_den: u32) -> Rational {
    let den = rng.random_range(1..=max_den.max(1)) as i64;
    let top = (hi * Rational::from_integer(BigInt::from(den))).floor().to_integer();
    let top = top.to_i64().unwrap_or(i64::MAX).max(0);
    Rational::new(BigInt::from(rng.random_range(0..=top)), BigInt::from(den))
}

/// Like [`rational_in`] but strictly positive.
pub fn positive_rational<R: Rng>(rng: &mut R, hi: &Rational, max_den: u32) -> Rational {
    loop {
        let r = rational_in(rng, hi, max_den);
        if !r.is_zero() {
            return r;
        }
    }
}

/// `k/den` with `1 <= k <= den`: a fraction in `(0, 1]`, hitting 1 often.
pub fn unit_fraction<R: Rng>(rng: &mut R, max_den: u32) -> Rational {
    let den = rng.random_range(1..=max_den.max(1)) as i64;
    let k = if rng.random_bool(0.25) { den } else { rng.random_range(1..=den) };
    Rational::new(BigInt::from(k), BigInt::from(den))
}

fn sample_time<R: Rng>(rng: &mut R, params: &GenParams) -> Rational {
    match &params.time_grid {
        Some(grid) if !grid.is_empty() => grid[rng.random_range(0..grid.len())].clone(),
        _ => {
            if rng.random_bool(0.3) {
                // integer times collide and exercise same-time merging
                let hi = params.time_range.floor().to_integer().to_i64().unwrap_or(0).max(0);
                int(rng.random_range(0..=hi))
            } else {
                rational_in(rng, &params.time_range, params.max_denominator)
            }
        }
    }
}

fn amount<R: Rng>(rng: &mut R, params: &GenParams) -> Rational {
    positive_rational(rng, &params.amount_range, params.max_denominator)
}

pub fn gen_project_with<R: Rng>(rng: &mut R, params: &GenParams) -> Project {
    let n = rng.random_range(0..=params.max_events);
    let mut times: Vec<Rational> = (0..n).map(|_| sample_time(rng, params)).collect();
    if n > 0 && rng.random_bool(0.5) {
        times[0] = Rational::zero();
    }
    times.sort();
    let mut negative = rng.random_bool(0.8);
    let raw: Vec<(Rational, Rational)> = times
        .into_iter()
        .map(|t| {
            let c = amount(rng, params);
            let c = if negative { -c } else { c };
            if rng.random_bool(0.6) {
                negative = !negative;
            }
            (t, c)
        })
        .collect();
    Project::new(raw).expect("generated times are nonnegative")
}

pub fn gen_project(seed: u64, params: &GenParams) -> Project {
    gen_project_with(&mut rng_from_seed(seed), params)
}

/// A project whose balance is nonnegative everywhere: a sum of inflows and
/// inflow-then-smaller-outflow pairs.
pub fn gen_nonnegative_with<R: Rng>(rng: &mut R, params: &GenParams) -> Project {
    if params.max_events == 0 || rng.random_bool(0.125) {
        return Project::zero();
    }
    let pieces = rng.random_range(1..=params.max_events.div_ceil(2));
    let mut raw = Vec::new();
    for _ in 0..pieces {
        let inflow = amount(rng, params);
        let t1 = sample_time(rng, params);
        if rng.random_bool(0.5) {
            let t2 = sample_time(rng, params);
            let (early, late) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let outflow = &inflow * unit_fraction(rng, params.max_denominator);
            raw.push((early, inflow));
            raw.push((late, -outflow));
        } else {
            raw.push((t1, inflow));
        }
    }
    Project::new(raw).expect("generated times are nonnegative")
}

/// `(x, y)` with `x ⪯ y` by construction: `y = x + n` for a nonnegative `n`.
pub fn gen_dominated_pair_with<R: Rng>(rng: &mut R, params: &GenParams) -> (Project, Project) {
    let x = gen_project_with(rng, params);
    let n = gen_nonnegative_with(rng, params);
    let y = &x + &n;
    (x, y)
}

pub fn gen_dominated_pair(seed: u64, params: &GenParams) -> (Project, Project) {
    gen_dominated_pair_with(&mut rng_from_seed(seed), params)
}
