use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use num_rational::BigRational;
use ssde_core::analysis::{Analysis, Diagnostics, SolutionKind, SystemSolution};
use ssde_core::funcrep::{Grid, SegmentedFunction};
use ssde_core::number::{format_rational, Field, Number, Rational};
use ssde_core::solver::{self, Order, SolveOptions, SolveReport};

use crate::problem::Problem;
use crate::{CliError, Settings};

/// How a value is written in reports: `p/q` for rationals, shortest
/// round-trip decimal for floats.
trait Show {
    fn show(&self) -> String;
}

impl Show for BigRational {
    fn show(&self) -> String {
        format_rational(self)
    }
}

impl Show for f64 {
    fn show(&self) -> String {
        format!("{self}")
    }
}

fn join<T: Show>(values: &[T]) -> String {
    values.iter().map(Show::show).collect::<Vec<_>>().join(" ")
}

fn write_diagnostics<T: Show>(out: &mut impl Write, d: &Diagnostics<T>) -> io::Result<()> {
    writeln!(out, "l_condition_sum: {}", d.l_condition_sum.show())?;
    writeln!(out, "contraction_factor: {}", d.contraction_factor.show())?;
    writeln!(out, "negative_mass: {}", d.negative_mass.show())?;
    writeln!(out, "forcing_mass: {}", d.forcing_mass.show())
}

/// Writes the solution block. `chosen` is the target `A` for a family.
fn write_solution<T: Field + Show>(out: &mut impl Write, s: &SystemSolution<T>, chosen: Option<T>) -> io::Result<()> {
    writeln!(out, "kind: {}", s.kind)?;
    writeln!(out, "alpha: {}", s.alpha.show())?;
    writeln!(out, "beta: {}", s.beta.show())?;
    match s.kind {
        SolutionKind::Unique => {
            writeln!(out, "A: {}", s.a.as_ref().expect("unique carries A").show())?;
            writeln!(out, "y: {}", join(s.boundary_values.as_deref().unwrap_or(&[])))?;
        }
        SolutionKind::Family => {
            for (k, (p, q)) in s.family.iter().enumerate() {
                writeln!(out, "y_{}: {} + {}*A", k + 1, p.show(), q.show())?;
            }
            match chosen {
                Some(a) => {
                    writeln!(out, "A: {}", a.show())?;
                    writeln!(out, "y: {}", join(&s.boundary_values_for(&a)))?;
                }
                None => writeln!(out, "A: free")?,
            }
        }
        SolutionKind::Inconsistent => writeln!(out, "A: none")?,
    }
    Ok(())
}

pub fn analyze(path: &Path, echo: bool) -> Result<u8, CliError> {
    let problem = Problem::load(path)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if echo {
        writeln!(out, "{}", problem.file.echo())?;
        return Ok(0);
    }
    let p = problem.ssde.piecemealing();
    writeln!(out, "breakpoints: {}", p.breakpoint_strings().join(" "))?;
    writeln!(out, "mode: {}", if problem.ssde.analysis().is_exact() { "exact" } else { "float" })?;
    if problem.ssde.order() == Order::Second {
        match problem.ssde.analysis() {
            Analysis::Exact { diagnostics, .. } => write_diagnostics(&mut out, diagnostics)?,
            Analysis::Numerical { diagnostics, .. } => write_diagnostics(&mut out, diagnostics)?,
        }
        writeln!(out, "kind: not applicable (order 2)")?;
        return Ok(0);
    }
    let kind = match problem.ssde.analysis() {
        Analysis::Exact { diagnostics, solution } => {
            write_diagnostics(&mut out, diagnostics)?;
            let chosen = problem.target_a.as_ref().and_then(Number::exact_value).cloned();
            let chosen = chosen.or_else(|| {
                problem
                    .target_a
                    .as_ref()
                    .map(|n| Rational::from_float(n.value()).expect("finite A"))
            });
            match solution {
                Ok(s) => write_solution(&mut out, s, chosen).map(|_| Ok(s.kind))?,
                Err(e) => Err(e.clone()),
            }
        }
        Analysis::Numerical { diagnostics, solution } => {
            write_diagnostics(&mut out, diagnostics)?;
            let chosen = problem.target_a.as_ref().map(Number::value);
            match solution {
                Ok(s) => write_solution(&mut out, s, chosen).map(|_| Ok(s.kind))?,
                Err(e) => Err(e.clone()),
            }
        }
    };
    match kind {
        Ok(SolutionKind::Inconsistent) => {
            out.flush()?;
            Err(CliError::Inconsistent("Inconsistent: the boundary system has no solution".into()))
        }
        Ok(_) => Ok(0),
        Err(e) => {
            writeln!(out, "kind: undetermined")?;
            out.flush()?;
            Err(e.into())
        }
    }
}

fn write_csv_to(f: &SegmentedFunction, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f.write_csv(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_report(out: &mut impl Write, problem: &Problem, r: &SolveReport) -> io::Result<()> {
    let order = match problem.ssde.order() {
        Order::First => 1,
        Order::Second => 2,
    };
    writeln!(out, "order: {order}")?;
    writeln!(out, "experimental: {}", r.experimental)?;
    writeln!(out, "converged: {}", r.converged)?;
    writeln!(out, "iterations: {}", r.iterations)?;
    if order == 1 {
        if let Ok(a) = problem.ssde.admissible_a() {
            writeln!(out, "A_target: {a}")?;
        }
    }
    writeln!(out, "A_achieved: {}", r.a_achieved)?;
    writeln!(out, "contraction_factor: {}", r.contraction_factor)?;
    match r.a_posteriori_bound {
        Some(b) => writeln!(out, "a_posteriori_bound: {b:e}")?,
        None => writeln!(out, "a_posteriori_bound: none")?,
    }
    writeln!(out, "residual: {:e}", r.residual)?;
    writeln!(out, "residual_exclusion: {}", r.residual_exclusion)?;
    let deltas: Vec<String> = r.deltas.iter().map(|d| format!("{d:e}")).collect();
    writeln!(out, "deltas: {}", deltas.join(" "))
}

pub fn solve(
    path: &Path,
    out: Option<&Path>,
    report: Option<&Path>,
    force: bool,
    settings: Settings,
) -> Result<u8, CliError> {
    let problem = Problem::load(path)?;
    let m = settings.grid.unwrap_or(problem.grid);
    let opts = SolveOptions {
        tol: settings.tol.unwrap_or(problem.tol),
        max_iter: settings.max_iter.unwrap_or(problem.max_iter),
        force,
    };
    let initial = problem.initial(m)?;
    let r = solver::solve(&problem.ssde, initial, opts)?;
    write_csv_to(&r.solution, out)?;
    match report {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            write_report(&mut w, &problem, &r)?;
            w.flush()?;
        }
        None => write_report(&mut io::stderr().lock(), &problem, &r)?,
    }
    if r.converged {
        Ok(0)
    } else {
        Err(CliError::NotConverged(format!(
            "{} iterations, last delta {:e}, tol {:e}",
            r.iterations,
            r.deltas.last().copied().unwrap_or(f64::NAN),
            opts.tol
        )))
    }
}

pub fn iterate(path: &Path, k: usize, outdir: &Path, force: bool, grid: Option<usize>) -> Result<u8, CliError> {
    let problem = Problem::load(path)?;
    let initial = problem.initial(grid.unwrap_or(problem.grid))?;
    let record = solver::iterate_and_record(&problem.ssde, initial, k, force)?;
    fs::create_dir_all(outdir)?;
    for (i, f) in record.iterates.iter().enumerate() {
        write_csv_to(f, Some(&outdir.join(format!("f_{i}.csv"))))?;
    }
    if let Some(image) = &record.image_of_last {
        write_csv_to(image, Some(&outdir.join(format!("P_f_{k}.csv"))))?;
    }
    if let Some(second) = &record.second_difference_of_last {
        write_csv_to(second, Some(&outdir.join(format!("second_difference_f_{k}.csv"))))?;
    }
    Ok(0)
}

/// Recovers the per-piece grid from the rows strictly inside each piece.
fn grid_from_rows(breakpoints: &[f64], rows: &[(f64, f64)]) -> Result<Grid, CliError> {
    let slack = 1e-12 * (breakpoints[breakpoints.len() - 1] - breakpoints[0]);
    let intervals = breakpoints
        .windows(2)
        .map(|w| rows.iter().filter(|(x, _)| *x > w[0] + slack && *x < w[1] - slack).count() + 1)
        .collect();
    Ok(Grid::new(breakpoints.to_vec(), intervals)?)
}

pub fn residual(path: &Path, input: Option<&Path>, grid: Option<usize>) -> Result<u8, CliError> {
    let problem = Problem::load(path)?;
    let y = match input {
        Some(p) => {
            let text = fs::read(p)?;
            let rows = ssde_core::funcrep::read_csv_rows(BufReader::new(&text[..]))?;
            let g = grid_from_rows(problem.ssde.piecemealing().breakpoints(), &rows)?;
            SegmentedFunction::read_csv(&g, BufReader::new(&text[..]))?
        }
        None => problem.initial(grid.unwrap_or(problem.grid))?,
    };
    let r = solver::residual(&problem.ssde, &y)?;
    println!("residual: {r:e}");
    println!("residual_exclusion: {}", solver::RESIDUAL_EXCLUSION);
    Ok(0)
}

pub fn bump(args: [&String; 4], nodes: usize, out: Option<&Path>) -> Result<u8, CliError> {
    let mut v = [0.0; 4];
    for (slot, text) in v.iter_mut().zip(args) {
        *slot = text
            .parse::<Number>()
            .map_err(|e| CliError::Invalid(format!("bump parameter: {e}")))?
            .value();
    }
    let [a, b, c, d] = v;
    if !(a < b && b < c && c < d) {
        return Err(ssde_core::Error::Ordering { a, b, c, d }.into());
    }
    if nodes < 3 {
        return Err(CliError::Invalid(format!("--grid must be at least 3 nodes, got {nodes}")));
    }
    let step = solver::solved_transition(512)?;
    let lo = a - (b - a);
    let hi = d + (d - c);
    let grid = Grid::uniform(vec![lo, hi], nodes - 1)?;
    let f = SegmentedFunction::try_sample(&grid, |x| {
        solver::bump(x, a, b, c, d, |t| step.eval(t).expect("t lies in [0, 1]"))
    })?;
    write_csv_to(&f, out)?;
    Ok(0)
}
