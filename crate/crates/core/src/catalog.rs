//! Named piecemealings used throughout the tests, the CLI and the README.

use num_bigint::BigInt;

use crate::number::Rational;
use crate::piecemeal::{AffineGraphMap, Piecemealing};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn exact_map(a: (i64, i64), d: (i64, i64), e: (i64, i64), f: (i64, i64)) -> AffineGraphMap {
    AffineGraphMap::exact(q(a.0, a.1), q(d.0, d.1), q(e.0, e.1), q(f.0, f.1))
}

/// `f'(x) = 2 f(2x)` on `[0, ½]`, `2 f(2 − 2x)` on `(½, 1]`.
pub fn transition() -> Piecemealing {
    transition_with_shifts(0, 0)
}

/// The transition piecemealing with integer vertical shifts on its two maps.
/// Shifts `(1, −1)` give an inconsistent boundary system.
pub fn transition_with_shifts(f1: i64, f2: i64) -> Piecemealing {
    Piecemealing::validate_exact(
        q(0, 1),
        q(1, 1),
        vec![
            exact_map((1, 2), (2, 1), (0, 1), (f1, 1)),
            exact_map((-1, 2), (2, 1), (1, 1), (f2, 1)),
        ],
    )
    .expect("transition piecemealing is valid")
}

/// Two maps on `[1, 4]` whose boundary system has exactly one solution:
/// with `y(1) = 1` it forces `y(2) = 23/15`, `y(4) = 31/5`, `∫y = 9`.
pub fn boundary_chart() -> Piecemealing {
    Piecemealing::validate_exact(
        q(1, 1),
        q(4, 1),
        vec![
            exact_map((1, 3), (2, 3), (2, 3), (-22, 15)),
            exact_map((2, 3), (-1, 6), (4, 3), (17, 6)),
        ],
    )
    .expect("chart piecemealing is valid")
}

/// Six-map second-order piecemealing on `[0, 1]`: ramp up, hold, ramp down,
/// ramp down, hold, ramp up, used for a cam motion law.
pub fn cam() -> Piecemealing {
    let d = [6, 0, -6, -6, 0, 6];
    let f = [0, 6, 6, 0, -6, -6];
    let maps = (0..6)
        .map(|i| exact_map((1, 6), (d[i], 1), (i as i64, 6), (f[i], 1)))
        .collect();
    Piecemealing::validate_exact(q(0, 1), q(1, 1), maps).expect("cam piecemealing is valid")
}

/// Single reversing map `x ↦ 1 − x` on `[0, 1]`.
pub fn reflection() -> Piecemealing {
    Piecemealing::validate_exact(q(0, 1), q(1, 1), vec![exact_map((-1, 1), (1, 1), (1, 1), (0, 1))])
        .expect("reflection piecemealing is valid")
}
