//! Boundary-value system of a first-order SSDE and its diagnostics.
//!
//! For a solution `y` of `y' = P(y)`, `y(x_0) = y_0`, write `y_k = y(x_k)` and
//! `A = ∫y`. Integrating `P(y)` piece by piece gives
//!
//! ```text
//! y_k = y_0 + Σ_{i≤k} ( |a_i| d_i A + f_i Δx_i )                    k = 1..n
//! A   = y_0 w + Σ_i (y_{i−1} − y_0) Δx_i + w A Σ_{a_i<0} a_i² d_i + ½ w² Σ a_i² f_i
//! ```
//!
//! where `w = x_n − x_0`. The second row needs `Σ a_i³ d_i / |a_i| = 0`. The
//! first row is triangular in the `y_k`, so substituting `y_k = p_k + q_k A`
//! collapses everything to one scalar equation `α A = β`.
//!
//! Note the `+ w A Σ_{a_i<0} a_i² d_i` term: a reversing map contributes
//! `−a_i² d_i (∫Y − w Y(x_n))`, so this term enters with a plus sign.

use crate::error::{Error, Result};
use crate::funcrep::SegmentedFunction;
use crate::number::{Field, Rational};
use crate::piecemeal::{Layout, Piecemealing};

/// Float-mode zero test for `α` and `β`.
pub const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    Unique,
    Family,
    Inconsistent,
}

impl std::fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolutionKind::Unique => "Unique",
            SolutionKind::Family => "Family",
            SolutionKind::Inconsistent => "Inconsistent",
        })
    }
}

/// Classified solution set of the boundary system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSolution<T> {
    pub kind: SolutionKind,
    pub alpha: T,
    pub beta: T,
    /// `(p_k, q_k)` with `y_k = p_k + q_k A`, for `k = 1..n`.
    pub family: Vec<(T, T)>,
    /// Present when `kind` is `Unique`.
    pub a: Option<T>,
    /// `y_1..y_n`, present when `kind` is `Unique`.
    pub boundary_values: Option<Vec<T>>,
}

impl<T: Field> SystemSolution<T> {
    /// `y_1..y_n` for a chosen `A`.
    pub fn boundary_values_for(&self, a: &T) -> Vec<T> {
        self.family
            .iter()
            .map(|(p, q)| p.clone() + q.clone() * a.clone())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics<T> {
    /// `Σ a_i³ d_i / |a_i|`.
    pub l_condition_sum: T,
    /// `½ w max |a_i d_i|`.
    pub contraction_factor: T,
    /// `Σ_{a_i<0} a_i² d_i`.
    pub negative_mass: T,
    /// `Σ a_i² f_i`.
    pub forcing_mass: T,
    pub width: T,
}

pub fn l_condition_sum<T: Field>(layout: &Layout<T>) -> T {
    layout.maps.iter().fold(T::zero(), |acc, m| {
        let a = m.a.clone();
        acc + a.clone() * a.clone() * a.clone() * m.d.clone() / a.abs()
    })
}

/// `½ (x_n − x_0) max_i |a_i d_i|`; below 1 means the Picard map contracts.
pub fn contraction_factor<T: Field>(layout: &Layout<T>) -> T {
    let max = layout
        .maps
        .iter()
        .fold(T::zero(), |acc, m| acc.max_of((m.a.clone() * m.d.clone()).abs()));
    T::half() * layout.width() * max
}

pub fn negative_mass<T: Field>(layout: &Layout<T>) -> T {
    layout
        .maps
        .iter()
        .filter(|m| m.a.is_negative())
        .fold(T::zero(), |acc, m| acc + m.a.clone() * m.a.clone() * m.d.clone())
}

pub fn forcing_mass<T: Field>(layout: &Layout<T>) -> T {
    layout
        .maps
        .iter()
        .fold(T::zero(), |acc, m| acc + m.a.clone() * m.a.clone() * m.f.clone())
}

pub fn diagnostics<T: Field>(layout: &Layout<T>) -> Diagnostics<T> {
    Diagnostics {
        l_condition_sum: l_condition_sum(layout),
        contraction_factor: contraction_factor(layout),
        negative_mass: negative_mass(layout),
        forcing_mass: forcing_mass(layout),
        width: layout.width(),
    }
}

/// `(p_k, q_k)` for `k = 0..n`, with `p_0 = y_0`, `q_0 = 0`.
fn elimination<T: Field>(layout: &Layout<T>, y0: &T) -> Vec<(T, T)> {
    let mut out = Vec::with_capacity(layout.maps.len() + 1);
    let (mut p, mut q) = (y0.clone(), T::zero());
    out.push((p.clone(), q.clone()));
    for (m, dx) in layout.maps.iter().zip(layout.widths()) {
        q = q + m.a.abs() * m.d.clone();
        p = p + m.f.clone() * dx;
        out.push((p.clone(), q.clone()));
    }
    out
}

/// `y_k = y_0 + Σ_{i≤k} (|a_i| d_i A + f_i Δx_i)` for `k = 1..n`.
pub fn predicted_boundary_values<T: Field>(layout: &Layout<T>, y0: &T, a: &T) -> Vec<T> {
    let mut y = y0.clone();
    layout
        .maps
        .iter()
        .zip(layout.widths())
        .map(|(m, dx)| {
            y = y.clone() + m.a.abs() * m.d.clone() * a.clone() + m.f.clone() * dx;
            y.clone()
        })
        .collect()
}

/// Solves and classifies the boundary system.
pub fn solve_system<T: Field>(layout: &Layout<T>, y0: &T) -> Result<SystemSolution<T>> {
    let l_sum = l_condition_sum(layout);
    if !l_sum.is_zero_within(PIVOT_TOL) {
        return Err(Error::LConditionViolated {
            sum: l_sum.to_string(),
        });
    }
    let w = layout.width();
    let widths = layout.widths();
    let pq = elimination(layout, y0);

    let mut alpha = T::one() - w.clone() * negative_mass(layout);
    let forcing = T::half() * w.clone() * w.clone() * forcing_mass(layout);
    let mut beta = y0.clone() * w.clone() + forcing.clone();
    let mut beta_scale = (y0.clone() * w).abs().to_f64() + forcing.abs().to_f64();
    for ((p, q), dx) in pq.iter().zip(&widths) {
        alpha = alpha - q.clone() * dx.clone();
        let term = (p.clone() - y0.clone()) * dx.clone();
        beta_scale += term.abs().to_f64();
        beta = beta + term;
    }

    let family: Vec<(T, T)> = pq.into_iter().skip(1).collect();
    let (kind, a, boundary_values) = if !alpha.is_zero_within(PIVOT_TOL) {
        let a = beta.clone() / alpha.clone();
        let ys: Vec<T> = family
            .iter()
            .map(|(p, q)| p.clone() + q.clone() * a.clone())
            .collect();
        (SolutionKind::Unique, Some(a), Some(ys))
    } else if beta.is_zero_within(PIVOT_TOL * beta_scale.max(1.0)) {
        (SolutionKind::Family, None, None)
    } else {
        (SolutionKind::Inconsistent, None, None)
    };
    Ok(SystemSolution {
        kind,
        alpha,
        beta,
        family,
        a,
        boundary_values,
    })
}

/// Exact when the piecemealing and `y0` are rational, float otherwise.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)] // built once per problem
pub enum Analysis {
    Exact {
        diagnostics: Diagnostics<Rational>,
        solution: Result<SystemSolution<Rational>>,
    },
    Numerical {
        diagnostics: Diagnostics<f64>,
        solution: Result<SystemSolution<f64>>,
    },
}

impl Analysis {
    pub fn run(p: &Piecemealing, y0: &crate::number::Number) -> Analysis {
        match (p.exact_layout(), y0.exact_value()) {
            (Some(layout), Some(y0)) => Analysis::Exact {
                diagnostics: diagnostics(layout),
                solution: solve_system(layout, y0),
            },
            _ => {
                let layout = p.float_layout();
                Analysis::Numerical {
                    diagnostics: diagnostics(layout),
                    solution: solve_system(layout, &y0.value()),
                }
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Analysis::Exact { .. })
    }

    pub fn kind(&self) -> Result<SolutionKind> {
        match self {
            Analysis::Exact { solution, .. } => solution.as_ref().map(|s| s.kind).map_err(Clone::clone),
            Analysis::Numerical { solution, .. } => {
                solution.as_ref().map(|s| s.kind).map_err(Clone::clone)
            }
        }
    }

    pub fn contraction_factor(&self) -> f64 {
        match self {
            Analysis::Exact { diagnostics, .. } => diagnostics.contraction_factor.to_f64(),
            Analysis::Numerical { diagnostics, .. } => diagnostics.contraction_factor,
        }
    }

    /// The `A` a solver may target: the forced value when unique, `target`
    /// when the system leaves `A` free.
    pub fn admissible_a(&self, target: Option<f64>) -> Result<f64> {
        let (kind, forced) = match self {
            Analysis::Exact { solution, .. } => {
                let s = solution.as_ref().map_err(Clone::clone)?;
                (s.kind, s.a.as_ref().map(Field::to_f64))
            }
            Analysis::Numerical { solution, .. } => {
                let s = solution.as_ref().map_err(Clone::clone)?;
                (s.kind, s.a)
            }
        };
        match kind {
            SolutionKind::Inconsistent => Err(Error::NoAdmissibleA),
            SolutionKind::Family => target.ok_or(Error::MissingTargetA),
            SolutionKind::Unique => {
                let forced = forced.expect("unique solution carries A");
                match target {
                    Some(t) if (t - forced).abs() > 1e-9 * (1.0 + forced.abs()) => {
                        Err(Error::TargetAMismatch {
                            supplied: t,
                            forced,
                        })
                    }
                    _ => Ok(forced),
                }
            }
        }
    }

    /// Boundary values `y_1..y_n` as floats for a given `A`.
    pub fn boundary_values_for(&self, a: f64) -> Result<Vec<f64>> {
        match self {
            Analysis::Exact { solution, .. } => {
                let s = solution.as_ref().map_err(Clone::clone)?;
                Ok(s.family
                    .iter()
                    .map(|(p, q)| p.to_f64() + q.to_f64() * a)
                    .collect())
            }
            Analysis::Numerical { solution, .. } => {
                Ok(solution.as_ref().map_err(Clone::clone)?.boundary_values_for(&a))
            }
        }
    }
}

/// The four terms of `∫_{x_0}^{x_n} ∫_{x_0}^{x} P(y)(t) dt dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleIntegralTerms {
    /// `Σ_i Δx_i ∫_{x_0}^{x_{i−1}} P(y)`.
    pub k: f64,
    /// `(∫Y) Σ a_i³ d_i / |a_i|` with `Y(x_0) = 0`.
    pub l: f64,
    /// `w (∫y) Σ_{a_i<0} a_i² d_i`.
    pub m: f64,
    /// `½ w² Σ a_i² f_i`.
    pub n: f64,
}

impl DoubleIntegralTerms {
    /// `K + L + M + N`.
    pub fn value(&self) -> f64 {
        self.k + self.l + self.m + self.n
    }
}

/// Closed-form split of the double integral of `P(y)`. `y` must be sampled on
/// a grid whose breakpoints include the piecemealing's.
pub fn double_integral_identity(p: &Piecemealing, y: &SegmentedFunction) -> Result<DoubleIntegralTerms> {
    let layout = p.float_layout();
    let prefix = p.apply(y)?.integrate_prefix(0.0);
    let k = layout
        .widths()
        .iter()
        .enumerate()
        .map(|(i, dx)| {
            // left end of piece i is the start node of segment i
            prefix.segment(i)[0] * dx
        })
        .sum();
    let big_y = y.integrate_prefix(0.0).integrate();
    let w = layout.width();
    Ok(DoubleIntegralTerms {
        k,
        l: big_y * l_condition_sum(layout),
        m: w * y.integrate() * negative_mass(layout),
        n: 0.5 * w * w * forcing_mass(layout),
    })
}
