use std::process::{Command, Output};

fn ws3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ws3")).args(args).env_remove("WS3_TOL").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn arrangement_check_passes() {
    let o = ws3(&["check", "arrangement"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("75 cells / 18 interior lines"));
}

#[test]
fn table2_reports_only_the_misprinted_row() {
    let o = ws3(&["check", "table2", "--h", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("777 of 784 entries matched"));
    let fails: Vec<&str> = out.lines().filter(|l| l.starts_with("FAIL table2[")).collect();
    assert_eq!(fails.len(), 7);
    assert!(fails.iter().all(|l| l.contains(",l27,") && l.split(' ').count() == 5));
}

#[test]
fn custom_family_point() {
    let o = ws3(&["reduce", "--m", "27", "--interior", "custom:1,1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let r = out.lines().find(|l| l.starts_with("family point r = ")).unwrap();
    let r1: f64 = r.trim_start_matches("family point r = [").split(',').next().unwrap().parse().unwrap();
    assert!((r1 - 286.0 / 15.0).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(ws3(&["reduce", "--m", "20"]).status.code(), Some(2));
    assert_eq!(ws3(&["reduce", "--interior", "custom:1,2"]).status.code(), Some(2));
    assert_eq!(ws3(&["collocation", "--triangle", "0,0,1,1,2,2"]).status.code(), Some(2));
    assert_eq!(ws3(&["no-such-command"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_ws3")).args(["basis-info"]).env("WS3_TOL", "-3").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn interpolation_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("square.txt");
    std::fs::write(&mesh, "4 2\n0 0\n1 0\n0 1\n1 1\n0 1 2\n1 3 2\n").unwrap();
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["interpolate", "--mesh", mesh.to_str().unwrap(), "--m", "18", "--fn", "sincos"];
        args.extend(["--grid", "3", "--out", out.to_str().unwrap()]);
        args.extend(extra);
        assert_eq!(ws3(&args).status.code(), Some(0));
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv", &[]);
    let b = run("b.csv", &["--sequential"]);
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("x,y,s,sx,sy,sxx,sxy,syy"));
    assert_eq!(lines.count(), 2 * 10);
}

#[test]
fn cubic_is_reproduced_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = ws3(&[
        "interpolate", "--mesh", "sample:fan", "--m", "21", "--fn", "poly:1,2,3,0.5,-1,0.25,1,0,-2,0.5", "--grid", "4",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let (x, y) = (v[0], v[1]);
        let p = 1.0 + 2.0 * x + 3.0 * y + 0.5 * x * x - x * y + 0.25 * y * y + x.powi(3) - 2.0 * x * y * y + 0.5 * y.powi(3);
        assert!((v[2] - p).abs() < 1e-9, "{line}");
    }
}

#[test]
fn c2_check_table() {
    let o = ws3(&["c2-check", "--mesh", "sample:fan", "--m", "27"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("edge,v0,v1,jump_s,"));
    assert_eq!(out.lines().count(), 1 + 8);
}

#[test]
fn bad_mesh_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("bad.txt");
    std::fs::write(&mesh, "3 1\n0 0\n1 0\n2 0\n0 1 2\n").unwrap();
    let o = ws3(&["c2-check", "--mesh", mesh.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate"));
}

#[test]
fn csv_dumps_have_headers() {
    let o = ws3(&["eval-basis", "--grid", "3"]);
    let out = stdout(&o);
    assert!(out.starts_with("x,y,B1,"));
    assert_eq!(out.lines().count(), 1 + 10);
    let o = ws3(&["collocation", "--csv"]);
    assert_eq!(stdout(&o).lines().count(), 29);
    let o = ws3(&["dump-arrangement"]);
    let text = stdout(&o);
    let cells: std::collections::BTreeSet<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(cells.len(), 75);
}

#[test]
fn tolerance_override_turns_a_pass_into_a_failure() {
    let o = Command::new(env!("CARGO_BIN_EXE_ws3"))
        .args(["check", "marsden"])
        .env("WS3_TOL", "marsden=1e-30")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL marsden")));
}
