//! Hand-checked inputs replayed by every run of the corresponding check.

use crate::project::Project;
use crate::rational::{int, Rational};

fn p(events: &[(i64, i64)]) -> Project {
    Project::new(events.iter().map(|&(t, c)| (int(t), int(c)))).expect("canned projects are valid")
}

/// `(a, b, τ)` for `-a·1_0 + b·1_τ`.
pub fn comp_witness_triples() -> Vec<(Rational, Rational, Rational)> {
    vec![(int(1), int(1), int(1)), (int(1), int(2), int(5))]
}

/// Pairs where the first break-even point of the pool exceeds both parts':
/// values 1, 3 and 4 on `x`, `y`, `x + y`.
pub fn acons_witness_pairs() -> Vec<(Project, Project)> {
    vec![(p(&[(0, -1), (1, 2), (2, -3), (4, 2)]), p(&[(0, -2), (3, 3)]))]
}

/// Pairs `(x, y)` with `x ⪯ y`.
///
/// The first breaks the modified metric: `y` never has a negative balance,
/// yet its inflow only covers its outflow at `t = 1`. The second breaks the
/// P1-restricted functional: `x` is P1 with payback 3, while the zero
/// project above it is not P1 and maps to `inf`.
pub fn mon_witness_pairs() -> Vec<(Project, Project)> {
    vec![
        (Project::zero(), p(&[(1, 1), (2, -1)])),
        (p(&[(0, -2), (1, 1), (3, 1)]), Project::zero()),
    ]
}
