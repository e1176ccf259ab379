use std::path::Path;
use std::process::{Command, Output};

use holdercover::cantor::ScheduleDoc;
use holdercover::curve::HolderCurve;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_holdercover"));
    c.env_remove("HOLDERCOVER_BUDGET");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write_corners(dir: &Path, depth: &str) -> String {
    let path = dir.join(format!("c{depth}.json"));
    let p = path.to_str().unwrap().to_string();
    let out = run(&["cantor", "corners", "--depth", depth, "--out", &p]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn curve_pipeline_writes_svg_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let pts = write_corners(dir.path(), "2");
    let svg = dir.path().join("out.svg");
    let json = dir.path().join("curve.json");
    let out = run(&[
        "curve", "--input", &pts, "--eps0", "2", "--levels", "6", "--d", "1.5",
        "--svg", svg.to_str().unwrap(), "--out", json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg") && svg_text.contains("<polyline"));
    let json_text = std::fs::read_to_string(&json).unwrap();
    assert!(json_text.contains("\"constant_bound\""));
    let curve = HolderCurve::from_json(&json_text).unwrap();
    assert!((curve.alpha - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn artifacts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let pts = write_corners(dir.path(), "3");
    let again = std::fs::read(&pts).unwrap();
    assert_eq!(std::fs::read(write_corners(dir.path(), "3")).unwrap(), again);
    for args in [
        vec!["beta", "sum", "--input", &pts, "--levels", "0:6"],
        vec!["beta", "bnv", "--input", &pts, "--beta0", "0.083333", "--d", "1.2"],
        vec!["dini", "--input", &pts, "--eps0", "1", "--levels", "8", "--d", "1.5"],
        vec!["dims", "--input", &pts, "--levels", "1:6"],
        vec!["chain", "--input", &pts, "--eps0", "1", "--levels", "5", "--d", "1.5"],
        vec!["cantor", "schedule", "--gamma", "3/4", "--stages", "3", "--delta", "5/8"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn schedule_round_trips() {
    let out = run(&["cantor", "schedule", "--gamma", "0.75", "--stages", "3", "--delta", "5/8"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let doc = ScheduleDoc::from_json(text.trim_end()).unwrap();
    assert_eq!(doc.gamma, "3/4");
    assert_eq!(doc.to_json(), text.trim_end());
    let (s, _) = doc.rebuild().unwrap();
    assert_eq!(s.ks, doc.ks);
}

#[test]
fn eq5_check_table() {
    let out = run(&["check", "eq5", "--gamma", "3/4", "--stages", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(2).unwrap().contains("176"));
}

#[test]
fn missing_input_exits_two_with_one_line() {
    let out = run(&["curve", "--input", "/no/such/pts.json", "--eps0", "2", "--levels", "6", "--d", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8(out.stderr).unwrap().lines().count(), 1);
}

#[test]
fn unknown_command_prints_usage() {
    let out = run(&["levitate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("Usage"));
}

#[test]
fn budget_flag_and_environment() {
    let out = bin()
        .args(["cantor", "corners", "--depth", "4"])
        .env("HOLDERCOVER_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = bin()
        .args(["cantor", "corners", "--depth", "4", "--budget", "4096"])
        .env("HOLDERCOVER_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unwritable_output_exits_three() {
    let out = run(&["cantor", "schedule", "--out", "/proc/holdercover/forbidden.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn precision_ceiling_is_reported() {
    let out = run(&["cantor", "schedule", "--stages", "3", "--precision-bits", "1"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
}
