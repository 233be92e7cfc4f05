//! Self-similar differential equations.
//!
//! An SSDE asks for `y` with `y' = P(y)` (or `y'' = P(y)`), where `P` cuts the
//! domain `[x_0, x_n]` into pieces and fills piece `i` with an affine copy
//! `d_i·y((x − e_i)/a_i) + f_i` of the whole graph of `y`. This crate
//!
//! - samples functions on per-piece uniform grids ([`funcrep`]),
//! - validates piecemealings and applies `P` ([`piecemeal`]),
//! - solves the exact boundary-value system that pins `y(x_k)` and `∫y`
//!   ([`analysis`]),
//! - runs Picard iteration to the solution ([`solver`]),
//! - and provides brute-force quadrature oracles ([`oracle`]).
//!
//! ```
//! use ssde_core::{catalog, number::Number, solver};
//! use ssde_core::funcrep::SegmentedFunction;
//!
//! let problem = solver::SsdeProblem::first_order(catalog::transition(), Number::from_i64(0), Some(0.5))?;
//! let start = SegmentedFunction::sample(&problem.grid(128)?, |x| x)?;
//! let report = solver::solve(&problem, start, solver::SolveOptions::default())?;
//! assert!(report.converged);
//! assert!((report.solution.last_value() - 1.0).abs() < 1e-6);
//! # Ok::<(), ssde_core::Error>(())
//! ```

pub mod analysis;
pub mod catalog;
mod error;
pub mod funcrep;
pub mod number;
pub mod oracle;
pub mod piecemeal;
pub mod solver;

pub use error::{Error, Result};
