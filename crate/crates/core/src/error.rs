use thiserror::Error;

/// Every failure the library can report.
///
/// Variant names double as the one-word diagnostics printed by the CLI, so
/// they stay stable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DomainError: x = {x} lies outside [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("InvalidInterval: [{lo}, {hi}] requires lo < hi")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("InvalidGrid: {0}")]
    InvalidGrid(String),

    #[error("NonFiniteSample: segment {segment}, node {node}")]
    NonFinite { segment: usize, node: usize },

    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),

    #[error("EvaluatorError: at x = {x}: {reason}")]
    Evaluator { x: f64, reason: String },

    #[error("EmptyPiecemealing: at least one map is required")]
    EmptyPiecemealing,

    #[error("DegenerateMap: map {index} has a = 0")]
    DegenerateMap { index: usize },

    #[error("TilingError: sum of |a_i| is {sum}, expected 1")]
    Tiling { sum: String },

    #[error("ShiftMismatch: map {index} has e = {actual}, breakpoints require {expected}")]
    ShiftMismatch {
        index: usize,
        actual: String,
        expected: String,
    },

    #[error("MissingExactValue: {0}")]
    MissingExact(String),

    #[error("DomainMismatch: {0}")]
    DomainMismatch(String),

    #[error("ArgumentOutOfRange: map {index} sends x = {x} back to {u}, outside the domain")]
    ArgumentOutOfRange { index: usize, x: f64, u: f64 },

    #[error("LConditionViolated: sum of a_i^3 d_i / |a_i| is {sum}, expected 0")]
    LConditionViolated { sum: String },

    #[error("NotContractive: contraction factor {factor} is not below 1")]
    NotContractive { factor: f64 },

    #[error("NoAdmissibleA: the boundary system is inconsistent")]
    NoAdmissibleA,

    #[error("MissingTargetA: the boundary system has a one-parameter family of solutions; supply A")]
    MissingTargetA,

    #[error("TargetAMismatch: supplied A = {supplied} but the boundary system forces A = {forced}")]
    TargetAMismatch { supplied: f64, forced: f64 },

    #[error("InitialIntegralMismatch: initial iterate integrates to {actual}, admissible A is {expected}")]
    InitialIntegralMismatch { expected: f64, actual: f64 },

    #[error("OrderingError: bump requires a < b < c < d, got ({a}, {b}, {c}, {d})")]
    Ordering { a: f64, b: f64, c: f64, d: f64 },

    #[error("InvalidQuadrature: {0}")]
    InvalidQuadrature(String),

    #[error("NonConvergent: refinement levels disagree ({latest:e} after {previous:e})")]
    NonConvergent { previous: f64, latest: f64 },

    #[error("ParseError: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
