use approx::assert_abs_diff_eq;
use ssde_core::catalog;
use ssde_core::funcrep::SegmentedFunction;
use ssde_core::number::Number;
use ssde_core::solver::{
    classic_transition, iterate_and_record, residual, solve, solved_transition, SolveOptions, SsdeProblem,
};

fn transition_problem() -> SsdeProblem {
    SsdeProblem::first_order(catalog::transition(), Number::from_i64(0), Some(0.5)).unwrap()
}

#[test]
fn transition_from_identity_converges() {
    let problem = transition_problem();
    let initial = SegmentedFunction::sample(&problem.grid(512).unwrap(), |x| x).unwrap();
    let report = solve(&problem, initial, SolveOptions::default()).unwrap();
    assert!(report.converged);
    assert!(report.iterations <= 60, "{} iterations", report.iterations);
    assert_abs_diff_eq!(report.deltas[0], 0.125, epsilon = 1e-12);
    for w in report.deltas.windows(2).filter(|w| w[0] > 1e-8) {
        assert!(w[1] <= 0.5 * w[0] + 1e-12, "{} -> {}", w[0], w[1]);
    }
    let f = &report.solution;
    assert_abs_diff_eq!(f.eval(0.5).unwrap(), 0.5, epsilon = 1e-6);
    assert_abs_diff_eq!(f.eval(1.0).unwrap(), 1.0, epsilon = 1e-6);
    assert!(report.residual <= 1e-3, "residual {}", report.residual);
    assert_abs_diff_eq!(report.a_achieved, 0.5, epsilon = 1e-9);
    let bound = report.a_posteriori_bound.unwrap();
    assert!(bound <= report.deltas.last().unwrap() * 1.0 + 1e-15);
}

#[test]
fn transition_solution_is_monotone_and_odd_about_the_middle() {
    let f = solved_transition(256).unwrap();
    let values: Vec<f64> = f.nodes().map(|(_, v)| v).collect();
    assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    for k in 0..=64 {
        let x = k as f64 / 64.0;
        let sym = f.eval(x).unwrap() + f.eval(1.0 - x).unwrap();
        assert_abs_diff_eq!(sym, 1.0, epsilon = 1e-6);
    }
}

#[test]
fn chart_solution_hits_exact_boundary_values() {
    let problem = SsdeProblem::first_order(catalog::boundary_chart(), Number::from_i64(1), None).unwrap();
    let initial = SegmentedFunction::constant(&problem.grid(512).unwrap(), 3.0);
    let report = solve(&problem, initial, SolveOptions::default()).unwrap();
    assert!(report.converged);
    let f = &report.solution;
    assert_abs_diff_eq!(f.first_value(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(f.eval(2.0).unwrap(), 23.0 / 15.0, epsilon = 1e-5);
    assert_abs_diff_eq!(f.eval(4.0).unwrap(), 31.0 / 5.0, epsilon = 1e-5);
    assert_abs_diff_eq!(report.a_achieved, 9.0, epsilon = 1e-4);
    assert!(report.residual <= 1e-3);
}

#[test]
fn chart_boundary_error_shrinks_with_the_grid() {
    let problem = SsdeProblem::first_order(catalog::boundary_chart(), Number::from_i64(1), None).unwrap();
    let error = |m: usize| {
        let initial = SegmentedFunction::constant(&problem.grid(m).unwrap(), 3.0);
        let f = solve(&problem, initial, SolveOptions::default()).unwrap().solution;
        (f.eval(2.0).unwrap() - 23.0 / 15.0).abs() + (f.last_value() - 31.0 / 5.0).abs()
    };
    let coarse = error(128);
    let fine = error(512);
    // second order: a factor 16 in theory
    assert!(fine < coarse / 10.0, "{coarse} vs {fine}");
}

#[test]
fn classic_transition_is_not_a_solution() {
    let problem = transition_problem();
    let f = SegmentedFunction::sample(&problem.grid(512).unwrap(), classic_transition).unwrap();
    let r = residual(&problem, &f).unwrap();
    // measured 0.0984 at M = 512
    assert!(r > 0.05, "{r}");
    assert!((0.09..0.11).contains(&r), "{r}");
}

#[test]
fn cam_iteration_from_one_minus_x() {
    let problem = SsdeProblem::second_order(catalog::cam(), Number::from_i64(0), Number::from_i64(0)).unwrap();
    let initial = SegmentedFunction::sample(&problem.grid(512).unwrap(), |x| 1.0 - x).unwrap();
    let record = iterate_and_record(&problem, initial, 4, false).unwrap();
    assert_eq!(record.iterates.len(), 5);
    let deltas = record.deltas();
    for w in deltas.windows(2) {
        assert!(w[1] <= 0.5 * w[0], "{deltas:?}");
    }
    let image = record.image_of_last.unwrap();
    let second = record.second_difference_of_last.unwrap();
    let mut worst = 0.0_f64;
    for (p, s) in image.segments().iter().zip(second.segments()) {
        let m = p.len() - 1;
        for k in 3..m - 2 {
            worst = worst.max((p[k] - s[k]).abs());
        }
    }
    assert!(worst <= 1e-2, "{worst}");
}

#[test]
fn cam_solve_is_experimental_and_rises_to_one() {
    let problem = SsdeProblem::second_order(catalog::cam(), Number::from_i64(0), Number::from_i64(0)).unwrap();
    let initial = SegmentedFunction::sample(&problem.grid(256).unwrap(), |x| 1.0 - x).unwrap();
    let report = solve(&problem, initial, SolveOptions::default()).unwrap();
    assert!(report.experimental);
    assert!(report.converged);
    assert!(report.a_posteriori_bound.is_none());
    assert_abs_diff_eq!(report.solution.last_value(), 1.0, epsilon = 1e-6);
    assert_abs_diff_eq!(report.solution.eval(0.5).unwrap(), 0.5, epsilon = 1e-6);
}
