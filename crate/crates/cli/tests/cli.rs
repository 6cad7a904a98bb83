use std::path::Path;
use std::process::{Command, Output};

use varparam_cli::report::SolutionKind;
use varparam_cli::{BatchSummary, RunReport};

fn varparam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varparam")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.toml")).display().to_string()
}

fn report(out: &Output) -> RunReport {
    RunReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).expect("stdout is a report")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn reduce_eqx10() {
    let out = varparam(&["reduce", &fixture("eqx10")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out).reduction.unwrap();
    assert_eq!(r.equation, "y' = K(y)/E(x)");
    assert_eq!(r.factor, "E(x) = x");
    assert!(r.k_route.starts_with("closed"), "{}", r.k_route);
    // A = 1: K(0.5) = 0.25 / 0.5
    let k: f64 = {
        let e = varparam::expr::parse(r.k.trim_start_matches("K(y) = "), &["y"]).unwrap();
        e.eval(&[("y", 0.5)]).unwrap()
    };
    assert!((k - 0.5).abs() < 1e-12, "{k}");
}

#[test]
fn reduce_eqx1() {
    let out = varparam(&["reduce", &fixture("eqx1")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out).reduction.unwrap();
    assert_eq!(r.k, "K(x) = sn(x, 0.5)");
    assert_eq!(r.rhs, "sn(x, 0.5)*y");
}

#[test]
fn malformed_expression_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let text = "class = \"III\"\na = \"1/x\"\nF2 = \"v*(v + )\"\n[initial]\nx0 = 1.0\ny0 = 0.0\nyp0 = 1.0\n[interval]\nend = 1.2\n";
    let path = write(dir.path(), "bad.toml", text);
    let out = varparam(&["reduce", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("F2") && err.contains("position 7"), "{err}");
}

#[test]
fn wrong_variable_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = "class = \"I\"\na = \"y\"\nF = \"x\"\nG = \"y\"\n[initial]\nx0 = 1.0\ny0 = 0.0\nyp0 = 1.0\n[interval]\nend = 1.2\n";
    let out = varparam(&["reduce", &write(dir.path(), "bad.toml", text)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_eqxx10_gives_the_implicit_relation() {
    let out = varparam(&["solve", &fixture("eqxx10")]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    let sol = rep.solution.unwrap();
    assert_eq!(sol.kind, SolutionKind::Implicit);
    assert!(sol.text.contains("-x^(-1)"), "{}", sol.text);
    // arctan s − s = −1/x + B with s = √(2e^{−2y} − 1), B = π/4, along the table
    for row in &rep.table {
        let s = (2.0 * (-2.0 * row.y).exp() - 1.0).sqrt();
        assert!((s.atan() - s + 1.0 / row.x - std::f64::consts::FRAC_PI_4).abs() < 1e-8);
    }
    assert_eq!(rep.table.len(), 101);
}

#[test]
fn solve_eqxx1_is_closed_and_matches_the_paper() {
    let out = varparam(&["solve", &fixture("eqxx1")]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep.solution.unwrap().kind, SolutionKind::Closed);
    // y = B x / (x³ + 3A) with A = B = 1
    for row in &rep.table {
        let x = row.x;
        assert!((row.y - x / (x.powi(3) + 3.0)).abs() < 1e-10, "x = {x}");
        assert!(row.residual.unwrap().abs() < 1e-8);
    }
}

#[test]
fn solve_straight_line() {
    let dir = tempfile::tempdir().unwrap();
    let text = "class = \"I\"\na = \"0\"\nF = \"0\"\nG = \"0\"\n[initial]\nx0 = 1.0\ny0 = 2.0\nyp0 = -3.0\n[interval]\nend = 2.0\n";
    let out = varparam(&["solve", &write(dir.path(), "line.toml", text)]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    let sol = rep.solution.unwrap();
    assert_eq!(sol.kind, SolutionKind::Closed);
    let y = varparam::expr::parse(sol.text.trim_start_matches("y = "), &["x"]).unwrap();
    for x in [1.0, 1.3, 2.0] {
        assert!((y.eval(&[("x", x)]).unwrap() - (-3.0 * (x - 1.0) + 2.0)).abs() < 1e-12);
    }
}

#[test]
fn every_paper_example_verifies() {
    for name in ["eqx10", "eqxx10", "eqxxx10", "eqx1", "eqxx1"] {
        let out = varparam(&["verify", &fixture(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let rep = report(&out);
        assert_eq!(rep.verdict(), Some(varparam::verify::Verdict::Pass));
    }
}

#[test]
fn singular_variant_fails_with_diagnostic() {
    let out = varparam(&["verify", &fixture("eqx10_singular")]);
    assert_eq!(out.status.code(), Some(1));
    let v = report(&out).verification.unwrap();
    assert!(!v.diagnostics.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("step size"));
}

#[test]
fn demo_runs_a_bundled_example() {
    let out = varparam(&["demo", "eqx1"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert!(rep.solution.is_some() && rep.verification.is_some());
    assert_eq!(varparam(&["demo", "nope"]).status.code(), Some(2));
}

#[test]
fn table_format_is_csv() {
    let out = varparam(&["verify", &fixture("eqxxx10"), "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,yp,residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 101);
    assert!(rows.iter().all(|r| r.len() == 4 && r[3].abs() < 1e-8));
    assert_eq!(rows[0][..3], [1.0, 0.0, 1.0]);
}

#[test]
fn overrides_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.json");
    let out = varparam(&[
        "verify",
        &fixture("eqxxx10"),
        "--interval",
        "1.2",
        "--tol",
        "1e-11",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rep = RunReport::from_json(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(rep.verification.unwrap().interval, (1.0, 1.2));
    assert_eq!(rep.input.tolerances.unwrap().integrator, Some(1e-11));
}

#[test]
fn report_round_trips() {
    for name in ["eqx10", "eqx1"] {
        let out = varparam(&["demo", name]);
        let rep = report(&out);
        assert_eq!(RunReport::from_json(&rep.to_json()).unwrap(), rep);
    }
}

#[test]
fn reports_are_deterministic() {
    let a = report(&varparam(&["demo", "eqxx1"])).without_timings();
    let b = report(&varparam(&["demo", "eqxx1"])).without_timings();
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn batch_over_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["eqx10", "eqxxx10", "eqx10_singular"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        write(dir.path(), &format!("{name}.toml"), &text);
    }
    write(dir.path(), "broken.toml", "class = \"V\"\n");
    write(dir.path(), "notes.txt", "ignored");
    let out = varparam(&["verify", dir.path().to_str().unwrap()]);
    let summary: BatchSummary = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(2));
    let codes: Vec<(&str, i32)> = summary.entries.iter().map(|e| (e.file.as_str(), e.exit_code)).collect();
    assert_eq!(codes, [("broken.toml", 2), ("eqx10.toml", 0), ("eqx10_singular.toml", 1), ("eqxxx10.toml", 0)]);
    assert_eq!((summary.passed, summary.failed), (2, 2));
}
