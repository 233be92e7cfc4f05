use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn ssde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssde"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in\n{report}"))
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn rows(csv: &str) -> Vec<(f64, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

#[test]
fn analyze_chart_is_exact() {
    let o = ssde(&["analyze", problem("chart.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(field(&out, "breakpoints"), "1 2 4");
    assert_eq!(field(&out, "kind"), "Unique");
    assert_eq!(field(&out, "alpha"), "5/9");
    assert_eq!(field(&out, "beta"), "5");
    assert_eq!(field(&out, "A"), "9");
    assert_eq!(field(&out, "y"), "23/15 31/5");
    assert_eq!(field(&out, "contraction_factor"), "1/3");
    assert_eq!(field(&out, "l_condition_sum"), "0");
}

#[test]
fn analyze_transition_is_a_family() {
    let o = ssde(&["analyze", problem("transition.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(field(&out, "kind"), "Family");
    assert_eq!(field(&out, "y_1"), "0 + 1*A");
    assert_eq!(field(&out, "y_2"), "0 + 2*A");
    assert_eq!(field(&out, "y"), "1/2 1");
}

#[test]
fn analyze_inconsistent_exits_3() {
    let o = ssde(&["analyze", problem("inconsistent.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let out = stdout(&o);
    assert_eq!(field(&out, "kind"), "Inconsistent");
    assert_eq!(field(&out, "alpha"), "0");
    assert_eq!(field(&out, "beta"), "1/4");
}

#[test]
fn invalid_inputs_exit_2_with_named_invariant() {
    let o = ssde(&["analyze", problem("bad_tiling.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("TilingError"), "{}", stderr(&o));
    assert_eq!(stderr(&o).lines().count(), 1);

    let dir = TempDir::new().unwrap();
    let shear = write(
        &dir,
        "shear.json",
        r#"{"interval": [0, 1], "order": 1, "y0": 0,
            "maps": [{"a": 1, "d": 0, "e": 0, "f": 1, "c": "1/2"}]}"#,
    );
    let o = ssde(&["analyze", shear.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ShearError"));

    let zero_shear = write(
        &dir,
        "zero_shear.json",
        r#"{"interval": [0, 1], "order": 1, "y0": 0,
            "maps": [{"a": 1, "d": 0, "e": 0, "f": 1, "c": 0}]}"#,
    );
    assert_eq!(ssde(&["analyze", zero_shear.to_str().unwrap()]).status.code(), Some(0));

    for (name, body) in [
        ("syntax.json", "{ not json"),
        ("unknown_key.json", r#"{"interval": [0, 1], "order": 1, "y0": 0, "maps": [], "colour": 1}"#),
        ("empty_maps.json", r#"{"interval": [0, 1], "order": 1, "y0": 0, "maps": []}"#),
        ("order3.json", r#"{"interval": [0, 1], "order": 3, "y0": 0, "maps": [{"a": 1, "d": 0, "e": 0, "f": 1}]}"#),
        ("bad_scalar.json", r#"{"interval": [0, "1/0"], "order": 1, "y0": 0, "maps": [{"a": 1, "d": 0, "e": 0, "f": 1}]}"#),
        ("reversed.json", r#"{"interval": [1, 0], "order": 1, "y0": 0, "maps": [{"a": 1, "d": 0, "e": 0, "f": 1}]}"#),
    ] {
        let p = write(&dir, name, body);
        let o = ssde(&["analyze", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", stderr(&o));
    }
    assert_eq!(ssde(&["analyze", "/nonexistent/problem.json"]).status.code(), Some(2));
}

#[test]
fn echo_round_trips() {
    let dir = TempDir::new().unwrap();
    for name in ["chart.json", "transition.json", "cam.json"] {
        let original = problem(name);
        let echo = ssde(&["analyze", "--echo", original.to_str().unwrap()]);
        assert_eq!(echo.status.code(), Some(0));
        let copy = write(&dir, name, &stdout(&echo));
        let again = ssde(&["analyze", "--echo", copy.to_str().unwrap()]);
        assert_eq!(stdout(&again), stdout(&echo), "echo is idempotent for {name}");
        let a = ssde(&["analyze", original.to_str().unwrap()]);
        let b = ssde(&["analyze", copy.to_str().unwrap()]);
        assert_eq!(stdout(&a), stdout(&b));
    }
    let echo = stdout(&ssde(&["analyze", "--echo", problem("chart.json").to_str().unwrap()]));
    assert!(echo.contains("\"-22/15\""));
    assert!(echo.contains("\"17/6\""));
}

#[test]
fn decimal_literals_stay_exact() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "decimal.json",
        r#"{"interval": [0, 1], "order": 1, "y0": 0, "A": 0.5,
            "maps": [{"a": 0.5, "d": 2, "e": 0, "f": 0}, {"a": -0.5, "d": 2.0, "e": 1, "f": 0}]}"#,
    );
    let out = stdout(&ssde(&["analyze", p.to_str().unwrap()]));
    assert_eq!(field(&out, "mode"), "exact");
    assert_eq!(field(&out, "breakpoints"), "0 1/2 1");
    assert_eq!(field(&out, "y"), "1/2 1");
}

#[test]
fn solve_transition_writes_csv_and_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("solution.csv");
    let report = dir.path().join("report.txt");
    let o = ssde(&[
        "solve",
        problem("transition.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("x,y\n"));
    assert!(!csv.contains('\r'));
    let data = rows(&csv);
    assert_eq!(data.len(), 1025);
    let (x, y) = data.iter().min_by(|a, b| (a.0 - 1.0).abs().total_cmp(&(b.0 - 1.0).abs())).unwrap();
    assert_eq!(*x, 1.0);
    assert!((y - 1.0).abs() <= 1e-6);
    let text = fs::read_to_string(&report).unwrap();
    assert_eq!(field(&text, "converged"), "true");
    assert_eq!(field(&text, "experimental"), "false");
    assert!(field(&text, "iterations").parse::<usize>().unwrap() <= 60);
    assert!(field(&text, "residual").parse::<f64>().unwrap() <= 1e-3);
    assert!(field(&text, "a_posteriori_bound").parse::<f64>().unwrap() < 1e-9);
    assert_eq!(field(&text, "deltas").split(' ').next(), Some("1.25e-1"));

    // the written solution passes the residual check when read back
    let r = ssde(&["residual", problem("transition.json").to_str().unwrap(), "--input", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    assert!(field(&stdout(&r), "residual").parse::<f64>().unwrap() <= 1e-3);
}

#[test]
fn csv_samples_round_trip_bit_for_bit() {
    let o = ssde(&["solve", problem("chart.json").to_str().unwrap(), "--grid", "16"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines().skip(1) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(format!("{v:.16e}"), field);
        }
    }
}

#[test]
fn solve_cam_is_experimental() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.txt");
    let o = ssde(&[
        "solve",
        problem("cam.json").to_str().unwrap(),
        "--grid",
        "256",
        "--out",
        dir.path().join("cam.csv").to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&report).unwrap();
    assert_eq!(field(&text, "experimental"), "true");
    assert_eq!(field(&text, "converged"), "true");
    assert_eq!(field(&text, "a_posteriori_bound"), "none");
}

#[test]
fn solve_exit_codes() {
    let o = ssde(&["solve", problem("inconsistent.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("NoAdmissibleA"));

    let o = ssde(&["solve", problem("transition.json").to_str().unwrap(), "--max-iter", "3"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("NotConverged"));

    let o = ssde(&["solve", problem("not_contractive.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("NotContractive"));
    let o = ssde(&["solve", problem("not_contractive.json").to_str().unwrap(), "--force", "--grid", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let dir = TempDir::new().unwrap();
    let no_a = fs::read_to_string(problem("transition.json")).unwrap().replace("\"A\": \"1/2\",", "");
    let p = write(&dir, "no_a.json", &no_a);
    let o = ssde(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("MissingTargetA"));

    let wrong_a = fs::read_to_string(problem("chart.json")).unwrap().replace("\"y0\": 1,", "\"y0\": 1, \"A\": 8,");
    let p = write(&dir, "wrong_a.json", &wrong_a);
    assert_eq!(ssde(&["solve", p.to_str().unwrap()]).status.code(), Some(3));

    let off = fs::read_to_string(problem("transition.json"))
        .unwrap()
        .replace("{\n    \"type\": \"linear\"\n  }", "{\"type\": \"constant\", \"coeffs\": [2]}");
    let p = write(&dir, "off.json", &off);
    let o = ssde(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("InitialIntegralMismatch"));
}

#[test]
fn iterate_writes_k_plus_one_files() {
    let dir = TempDir::new().unwrap();
    let o = ssde(&[
        "iterate",
        problem("transition.json").to_str().unwrap(),
        "5",
        "--outdir",
        dir.path().to_str().unwrap(),
        "--grid",
        "64",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["f_0.csv", "f_1.csv", "f_2.csv", "f_3.csv", "f_4.csv", "f_5.csv"]);
    let f1 = rows(&fs::read_to_string(dir.path().join("f_1.csv")).unwrap());
    for (x, y) in f1 {
        let expected = if x <= 0.5 { 2.0 * x * x } else { 4.0 * x - 2.0 * x * x - 1.0 };
        assert!((y - expected).abs() < 1e-12);
    }

    let zero = TempDir::new().unwrap();
    let o = ssde(&["iterate", problem("chart.json").to_str().unwrap(), "0", "--outdir", zero.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_dir(zero.path()).unwrap().count(), 1);
}

#[test]
fn iterate_cam_adds_image_and_second_difference() {
    let dir = TempDir::new().unwrap();
    let o = ssde(&["iterate", problem("cam.json").to_str().unwrap(), "4", "--outdir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["f_0.csv", "f_4.csv", "P_f_4.csv", "second_difference_f_4.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let f0 = rows(&fs::read_to_string(dir.path().join("f_0.csv")).unwrap());
    assert_eq!(f0[0], (0.0, 1.0));
}

#[test]
fn residual_of_initial_iterate() {
    let o = ssde(&["residual", problem("transition.json").to_str().unwrap(), "--grid", "64"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(field(&stdout(&o), "residual").parse::<f64>().unwrap() > 0.5);
}

#[test]
fn bump_samples_plateau_and_support() {
    let o = ssde(&["bump", "0", "1", "2", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let data = rows(&stdout(&o));
    assert_eq!(data.len(), 1001);
    assert_eq!(data.first().unwrap().0, -1.0);
    assert_eq!(data.last().unwrap().0, 4.0);
    for &(x, y) in &data {
        if x <= 0.0 || x >= 3.0 {
            assert_eq!(y, 0.0, "x = {x}");
        }
        if (1.0..=2.0).contains(&x) {
            assert!((y - 1.0).abs() < 1e-12, "x = {x}");
        }
    }
    let at_half = data.iter().find(|(x, _)| (x - 0.5).abs() < 1e-12).unwrap();
    assert!((at_half.1 - 0.5).abs() <= 1e-6);

    let o = ssde(&["bump", "-3", "-1", "1/2", "3", "--grid", "11"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(rows(&stdout(&o)).len(), 11);
}

#[test]
fn bump_rejects_bad_ordering() {
    let o = ssde(&["bump", "0", "2", "1", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("OrderingError"));
    assert_eq!(ssde(&["bump", "0", "1", "2", "x"]).status.code(), Some(2));
}
