//! Brute-force quadrature used to check the closed-form identities.
//!
//! Nothing here calls into [`crate::analysis`]; the oracles only see raw
//! pointwise evaluators (typically [`Piecemealing::branch_value`] over an
//! exact `y`).
//!
//! [`Piecemealing::branch_value`]: crate::piecemeal::Piecemealing::branch_value

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::funcrep::{Grid, Interval, SegmentedFunction};
use crate::piecemeal::{AffineGraphMap, Piecemealing};

/// Refinement levels (sub-intervals per piece) and whether to extrapolate.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    levels: Vec<usize>,
    richardson: bool,
}

impl QuadratureSpec {
    pub fn new(levels: Vec<usize>, richardson: bool) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidQuadrature("need at least two levels".into()));
        }
        if levels[0] == 0 || levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidQuadrature(
                "levels must be positive and strictly increasing".into(),
            ));
        }
        Ok(QuadratureSpec { levels, richardson })
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            levels: vec![256, 512, 1024],
            richardson: true,
        }
    }
}

/// A quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// `∫ f` over `interval`.
pub fn brute_integral(f: impl Fn(f64) -> f64, interval: Interval, spec: &QuadratureSpec) -> Result<Estimate> {
    brute_integral_piecewise(|_, x| f(x), &[interval.lo(), interval.hi()], spec)
}

/// `∫ f` over `[b_0, b_n]` where piece `i` is evaluated by `f(i, x)` on
/// `[b_i, b_{i+1}]`, both ends included, so jumps at breakpoints cost nothing.
pub fn brute_integral_piecewise(
    f: impl Fn(usize, f64) -> f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let runs = spec
        .levels
        .iter()
        .map(|&n| trapezoid_levels(&f, breakpoints, n, false))
        .collect::<Result<Vec<_>>>()?;
    extrapolate(&runs, &spec.levels, spec.richardson)
}

/// `∫_{b_0}^{b_n} ∫_{b_0}^{x} f(t) dt dx` by iterated trapezoid: a running
/// inner integral, then an outer trapezoid over it.
pub fn brute_double_integral(
    f: impl Fn(f64) -> f64,
    interval: Interval,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    brute_double_integral_piecewise(|_, x| f(x), &[interval.lo(), interval.hi()], spec)
}

pub fn brute_double_integral_piecewise(
    f: impl Fn(usize, f64) -> f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let runs = spec
        .levels
        .iter()
        .map(|&n| trapezoid_levels(&f, breakpoints, n, true))
        .collect::<Result<Vec<_>>>()?;
    extrapolate(&runs, &spec.levels, spec.richardson)
}

/// One trapezoid pass with `n` sub-intervals per piece. Returns the value and
/// an absolute-magnitude scale for the rounding floor.
fn trapezoid_levels(
    f: &impl Fn(usize, f64) -> f64,
    breakpoints: &[f64],
    n: usize,
    double: bool,
) -> Result<(f64, f64)> {
    if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidQuadrature("breakpoints must increase".into()));
    }
    let mut total = 0.0;
    let mut magnitude = 0.0;
    let mut inner = 0.0;
    for (i, w) in breakpoints.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        let h = (hi - lo) / n as f64;
        let node = |k: usize| if k == n { hi } else { lo + (hi - lo) * (k as f64 / n as f64) };
        let mut prev = f(i, lo);
        if !prev.is_finite() {
            return Err(Error::Evaluator {
                x: lo,
                reason: "non-finite value".into(),
            });
        }
        for k in 1..=n {
            let x = node(k);
            let cur = f(i, x);
            if !cur.is_finite() {
                return Err(Error::Evaluator {
                    x,
                    reason: "non-finite value".into(),
                });
            }
            let step = 0.5 * h * (prev + cur);
            magnitude += 0.5 * h * (prev.abs() + cur.abs());
            if double {
                let before = inner;
                inner += step;
                total += 0.5 * h * (before + inner);
            } else {
                total += step;
            }
            prev = cur;
        }
    }
    if double {
        magnitude *= breakpoints[breakpoints.len() - 1] - breakpoints[0];
    }
    Ok((total, magnitude))
}

fn extrapolate(runs: &[(f64, f64)], levels: &[usize], richardson: bool) -> Result<Estimate> {
    let t: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let last = t.len() - 1;
    let scale = runs[last].1 + t[last].abs();
    let floor = 16.0 * f64::EPSILON * scale;
    // recursive summation over n nodes can lose about n ulps
    let noise = 2.0 * levels[last] as f64 * f64::EPSILON * scale;

    if t.len() >= 3 {
        let previous = (t[last - 1] - t[last - 2]).abs();
        let latest = (t[last] - t[last - 1]).abs();
        if latest > 10.0 * previous + noise {
            return Err(Error::NonConvergent { previous, latest });
        }
    }

    let ratio_sq = |k: usize| {
        let r = levels[k] as f64 / levels[k - 1] as f64;
        r * r
    };
    let richardson_at = |k: usize| (ratio_sq(k) * t[k] - t[k - 1]) / (ratio_sq(k) - 1.0);

    let (value, error) = if richardson {
        let value = richardson_at(last);
        let error = if t.len() >= 3 {
            (value - richardson_at(last - 1)).abs()
        } else {
            (t[last] - t[last - 1]).abs() / (ratio_sq(last) - 1.0)
        };
        (value, error)
    } else {
        (t[last], (t[last] - t[last - 1]).abs())
    };
    Ok(Estimate {
        value,
        error: error + floor,
    })
}

/// Random continuous piecewise-linear function on `interval` whose trapezoid
/// integral is zero up to rounding. Same seed, same samples.
pub fn random_zero_mean(interval: Interval, seed: u64) -> SegmentedFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let segments = rng.gen_range(1..=3usize);
    let mut cuts: Vec<f64> = (1..segments).map(|_| rng.gen_range(0.1..0.9)).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut breakpoints = vec![interval.lo()];
    for c in cuts {
        let b = interval.lo() + c * interval.width();
        if b > *breakpoints.last().unwrap() + 1e-3 * interval.width() {
            breakpoints.push(b);
        }
    }
    breakpoints.push(interval.hi());
    let intervals: Vec<usize> = (1..breakpoints.len()).map(|_| rng.gen_range(2..=64)).collect();
    let grid = Grid::new(breakpoints, intervals).expect("random grid is valid");
    let scale = rng.gen_range(0.1..10.0);

    let mut shared = None;
    let samples: Vec<Vec<f64>> = grid
        .intervals()
        .iter()
        .map(|&m| {
            let mut seg = Vec::with_capacity(m + 1);
            seg.push(shared.unwrap_or_else(|| scale * rng.gen_range(-1.0..1.0)));
            for _ in 0..m {
                seg.push(scale * rng.gen_range(-1.0..1.0));
            }
            shared = seg.last().copied();
            seg
        })
        .collect();
    let f = SegmentedFunction::new(grid, samples).expect("finite samples");
    let width = interval.width();
    // two passes: the second removes the rounding left by the first
    let once = f.map(|_, v| v - f.integrate() / width);
    once.map(|_, v| v - once.integrate() / width)
}

/// Polynomial in the normalized variable `t = (x − lo) / width`, so
/// coefficients stay meaningful on any interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub lo: f64,
    pub width: f64,
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.lo) / self.width;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

/// Random polynomial of degree at most `max_degree`, coefficients in `[-2, 2]`.
pub fn random_polynomial(interval: Interval, max_degree: usize, seed: u64) -> Polynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degree = rng.gen_range(0..=max_degree);
    Polynomial {
        lo: interval.lo(),
        width: interval.width(),
        coeffs: (0..=degree).map(|_| rng.gen_range(-2.0..2.0)).collect(),
    }
}

/// Random float piecemealing of `interval` with 1 to `max_maps` maps.
/// With `negative` set, at least one map reverses orientation.
pub fn random_piecemealing(interval: Interval, max_maps: usize, negative: bool, seed: u64) -> Piecemealing {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_maps.max(1));
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut signs: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    if negative && !signs.iter().any(|&s| s) {
        let k = rng.gen_range(0..n);
        signs[k] = true;
    }
    let (lo, hi, w) = (interval.lo(), interval.hi(), interval.width());
    let mut right = lo;
    let maps = weights
        .iter()
        .zip(&signs)
        .enumerate()
        .map(|(i, (&weight, &reversed))| {
            let size = weight / total;
            right = if i + 1 == n { hi } else { right + size * w };
            let a = if reversed { -size } else { size };
            let e = if reversed { right - a * lo } else { right - a * hi };
            let d = rng.gen_range(-3.0..3.0);
            let f = rng.gen_range(-3.0..3.0);
            AffineGraphMap::new(a, d, e, f)
        })
        .collect();
    Piecemealing::validate(interval, maps).expect("generated maps tile the interval")
}
