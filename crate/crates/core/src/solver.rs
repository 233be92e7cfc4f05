//! Picard iteration for first- and second-order SSDEs.
//!
//! Order 1 iterates `F(y) = y_0 + ∫_{x_0}^{x} P(y)`. Order 2 iterates
//! `y_0 + y'_0 (x − x_0) + ∫∫ P(y)`. For order 1 the iteration contracts in
//! the sup norm on functions with a fixed integral `A` whenever the
//! contraction factor is below 1; order 2 has no such guarantee and is run
//! as an experiment.

use crate::analysis::Analysis;
use crate::error::{Error, Result};
use crate::funcrep::{Grid, SegmentedFunction};
use crate::number::Number;
use crate::piecemeal::Piecemealing;

/// Nodes next to each breakpoint left out of the residual.
pub const RESIDUAL_EXCLUSION: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

impl TryFrom<u32> for Order {
    type Error = Error;

    fn try_from(v: u32) -> Result<Self> {
        match v {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            _ => Err(Error::Parse(format!("order must be 1 or 2, got {v}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SsdeProblem {
    piecemealing: Piecemealing,
    order: Order,
    y0: Number,
    yprime0: Number,
    target_a: Option<f64>,
    analysis: Analysis,
}

impl SsdeProblem {
    pub fn first_order(piecemealing: Piecemealing, y0: Number, target_a: Option<f64>) -> Result<Self> {
        Self::new(piecemealing, Order::First, y0, Number::from_i64(0), target_a)
    }

    pub fn second_order(piecemealing: Piecemealing, y0: Number, yprime0: Number) -> Result<Self> {
        Self::new(piecemealing, Order::Second, y0, yprime0, None)
    }

    /// Runs the boundary-system analysis up front. A supplied `target_a` must
    /// agree with a uniquely forced `A`.
    pub fn new(
        piecemealing: Piecemealing,
        order: Order,
        y0: Number,
        yprime0: Number,
        target_a: Option<f64>,
    ) -> Result<Self> {
        let analysis = Analysis::run(&piecemealing, &y0);
        if let (Some(_), Order::First) = (target_a, order) {
            if let Err(e @ Error::TargetAMismatch { .. }) = analysis.admissible_a(target_a) {
                return Err(e);
            }
        }
        Ok(SsdeProblem {
            piecemealing,
            order,
            y0,
            yprime0,
            target_a,
            analysis,
        })
    }

    pub fn piecemealing(&self) -> &Piecemealing {
        &self.piecemealing
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn y0(&self) -> f64 {
        self.y0.value()
    }

    pub fn yprime0(&self) -> f64 {
        self.yprime0.value()
    }

    pub fn target_a(&self) -> Option<f64> {
        self.target_a
    }

    pub fn analysis(&self) -> &Analysis {
        &self.analysis
    }

    /// The integral every first-order iterate must carry.
    pub fn admissible_a(&self) -> Result<f64> {
        self.analysis.admissible_a(self.target_a)
    }

    pub fn contraction_factor(&self) -> f64 {
        self.analysis.contraction_factor()
    }

    pub fn grid(&self, m: usize) -> Result<Grid> {
        self.piecemealing.grid(m)
    }
}

/// One application of the Picard map.
pub fn picard_step(problem: &SsdeProblem, y: &SegmentedFunction) -> Result<SegmentedFunction> {
    let image = problem.piecemealing.apply(y)?;
    Ok(match problem.order {
        Order::First => image.integrate_prefix(problem.y0()),
        Order::Second => image
            .integrate_prefix(problem.yprime0())
            .integrate_prefix(problem.y0()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Iterate even when the contraction factor is not below 1.
    pub force: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 200,
            force: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: SegmentedFunction,
    pub iterations: usize,
    /// Sup-distance between successive iterates.
    pub deltas: Vec<f64>,
    pub residual: f64,
    pub converged: bool,
    /// `∫` of the final iterate.
    pub a_achieved: f64,
    pub contraction_factor: f64,
    /// `δ_last · m / (1 − m)` when `m < 1` (first order only).
    pub a_posteriori_bound: Option<f64>,
    /// Second-order runs carry no convergence guarantee.
    pub experimental: bool,
    pub residual_exclusion: usize,
}

/// Checks the preconditions shared by [`solve`] and [`iterate_and_record`].
fn check_preconditions(problem: &SsdeProblem, initial: &SegmentedFunction, force: bool) -> Result<()> {
    if initial.breakpoints() != problem.piecemealing.breakpoints() {
        return Err(Error::DomainMismatch(
            "initial iterate must be sampled on the problem's breakpoints".into(),
        ));
    }
    if problem.order == Order::Second {
        return Ok(());
    }
    let a = problem.admissible_a()?;
    let actual = initial.integrate();
    if (actual - a).abs() > 1e-9 * (1.0 + a.abs()) {
        return Err(Error::InitialIntegralMismatch { expected: a, actual });
    }
    let m = problem.contraction_factor();
    if m >= 1.0 && !force {
        return Err(Error::NotContractive { factor: m });
    }
    Ok(())
}

/// Iterates [`picard_step`] until successive iterates are within `tol` in the
/// sup norm, or `max_iter` steps have run.
pub fn solve(problem: &SsdeProblem, initial: SegmentedFunction, opts: SolveOptions) -> Result<SolveReport> {
    check_preconditions(problem, &initial, opts.force)?;
    let mut y = initial;
    let mut deltas = Vec::new();
    let mut converged = false;
    for _ in 0..opts.max_iter {
        let next = picard_step(problem, &y)?;
        let delta = next.sup_distance(&y)?;
        deltas.push(delta);
        y = next;
        if delta <= opts.tol {
            converged = true;
            break;
        }
    }
    let m = problem.contraction_factor();
    let first_order = problem.order == Order::First;
    let a_posteriori_bound = match deltas.last() {
        Some(&d) if first_order && m < 1.0 => Some(d * m / (1.0 - m)),
        _ => None,
    };
    Ok(SolveReport {
        residual: residual(problem, &y)?,
        a_achieved: y.integrate(),
        iterations: deltas.len(),
        solution: y,
        deltas,
        converged,
        contraction_factor: m,
        a_posteriori_bound,
        experimental: !first_order,
        residual_exclusion: RESIDUAL_EXCLUSION,
    })
}

/// `max |D y − P(y)|` over segment-interior nodes, where `D` is the central
/// first difference (order 1) or the central second difference (order 2).
/// Nodes within [`RESIDUAL_EXCLUSION`] of a breakpoint are skipped, since
/// `P(y)` may jump there.
pub fn residual(problem: &SsdeProblem, y: &SegmentedFunction) -> Result<f64> {
    let image = problem.piecemealing.apply(y)?;
    if image.grid() != y.grid() {
        return Err(Error::ShapeMismatch(
            "residual needs y on the problem's breakpoints".into(),
        ));
    }
    let mut worst = 0.0_f64;
    for (j, (s, z)) in y.segments().iter().zip(image.segments()).enumerate() {
        let h = y.grid().step(j);
        let m = s.len() - 1;
        for k in (RESIDUAL_EXCLUSION + 1)..m.saturating_sub(RESIDUAL_EXCLUSION) {
            let d = match problem.order {
                Order::First => (s[k + 1] - s[k - 1]) / (2.0 * h),
                Order::Second => (s[k + 1] - 2.0 * s[k] + s[k - 1]) / (h * h),
            };
            worst = worst.max((d - z[k]).abs());
        }
    }
    Ok(worst)
}

/// Node-wise second difference; segment end nodes use the one-sided stencil
/// of their nearest interior neighbour.
pub fn second_difference(y: &SegmentedFunction) -> SegmentedFunction {
    let segments = y
        .segments()
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let h2 = y.grid().step(j).powi(2);
            let m = s.len() - 1;
            (0..=m)
                .map(|k| {
                    let c = k.clamp(1, m - 1);
                    (s[c + 1] - 2.0 * s[c] + s[c - 1]) / h2
                })
                .collect()
        })
        .collect();
    SegmentedFunction::new(y.grid().clone(), segments).expect("same grid as y")
}

/// Iterates recorded for plotting.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    /// `f_0..f_k`.
    pub iterates: Vec<SegmentedFunction>,
    /// Order 2 only: `P(f_k)`.
    pub image_of_last: Option<SegmentedFunction>,
    /// Order 2 only: second difference of `f_k`.
    pub second_difference_of_last: Option<SegmentedFunction>,
}

impl IterationRecord {
    /// Sup-distances between successive iterates.
    pub fn deltas(&self) -> Vec<f64> {
        self.iterates
            .windows(2)
            .map(|w| w[1].sup_distance(&w[0]).expect("iterates share a grid"))
            .collect()
    }
}

pub fn iterate_and_record(
    problem: &SsdeProblem,
    initial: SegmentedFunction,
    k: usize,
    force: bool,
) -> Result<IterationRecord> {
    check_preconditions(problem, &initial, force)?;
    let mut iterates = vec![initial];
    for _ in 0..k {
        let next = picard_step(problem, iterates.last().unwrap())?;
        iterates.push(next);
    }
    let (image_of_last, second_difference_of_last) = match problem.order {
        Order::First => (None, None),
        Order::Second => {
            let last = iterates.last().unwrap();
            (
                Some(problem.piecemealing.apply(last)?),
                Some(second_difference(last)),
            )
        }
    };
    Ok(IterationRecord {
        iterates,
        image_of_last,
        second_difference_of_last,
    })
}

/// `g(x)/(g(x) + g(1 − x))` with `g(x) = e^{−1/x}` for `x > 0`, else 0.
pub fn classic_transition(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    // ratio g(1−x)/g(x) = e^{s}; divide through by the larger exponential
    let s = 1.0 / x - 1.0 / (1.0 - x);
    if s > 0.0 {
        let e = (-s).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + s.exp())
    }
}

/// 0 below 0, `step` on `[0, 1]`, 1 above 1.
pub fn step_extension(t: f64, step: impl Fn(f64) -> f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        step(t)
    }
}

/// Smooth bump with support `[a, d]` and plateau `[b, c]`, the product of a
/// rising and a falling copy of the step-extended transition.
pub fn bump(x: f64, a: f64, b: f64, c: f64, d: f64, step: impl Fn(f64) -> f64) -> Result<f64> {
    if !(a < b && b < c && c < d) {
        return Err(Error::Ordering { a, b, c, d });
    }
    let rise = step_extension((x - a) / (b - a), &step);
    let fall = step_extension((d - x) / (d - c), &step);
    Ok(rise * fall)
}

/// Solves `f' = P(f)` for the transition piecemealing with `f(0) = 0`,
/// `∫f = ½`, starting from `f_0(x) = x` on `m` sub-intervals per piece.
pub fn solved_transition(m: usize) -> Result<SegmentedFunction> {
    let p = crate::catalog::transition();
    let problem = SsdeProblem::first_order(p, Number::from_i64(0), Some(0.5))?;
    let initial = SegmentedFunction::sample(&problem.grid(m)?, |x| x)?;
    let report = solve(&problem, initial, SolveOptions::default())?;
    Ok(report.solution)
}
