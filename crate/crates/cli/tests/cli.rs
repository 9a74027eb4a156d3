use std::io::Write;
use std::path::PathBuf;
use std::process::Command;

use multiphase_cli::report::{Report, Status};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn tuple_file(src: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(src.as_bytes()).unwrap();
    f
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_multiphase")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

/// Runs with `--json`, checks the round trip and returns the report.
fn run_json(args: &[&str]) -> (i32, Report) {
    let mut all = args.to_vec();
    all.push("--json");
    let (code, out, err) = run(&all);
    assert!(code < 2, "{args:?} failed: {err}");
    let report: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(report.to_json(), out, "round trip changed the report");
    (code, report)
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_l1() {
    let l1 = fixture("L1.loop");
    let (code, r) = run_json(&["synth", path(&l1), "--max-depth", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r.status, Status::Found);
    assert_eq!(r.depth, Some(3));
    assert_eq!(r.tuple.len(), 3);
    assert_eq!(r.certificates.len(), 4);
    assert_eq!(r.domain, "rat");
    assert!(!r.hull_applied);

    let (code, out, _) = run(&["synth", path(&l1), "--lrf-only"]);
    assert_eq!(code, 1);
    assert!(out.contains("no linear ranking function"));
}

#[test]
fn l4_needs_integers() {
    let l4 = fixture("L4.loop");
    let (code, r) = run_json(&["synth", path(&l4), "--domain", "rat", "--max-depth", "5"]);
    assert_eq!(code, 1);
    assert_eq!(r.status, Status::NotFound);
    let (code, r) = run_json(&["synth", path(&l4), "--domain", "int", "--max-depth", "2"]);
    assert_eq!(code, 0);
    assert!(r.hull_applied);
    assert_eq!(r.domain, "int");

    let (code, out, _) = run(&["hull", path(&l4)]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "-x1 <= -1"), "{out}");
}

#[test]
fn bound_l6() {
    let l6 = fixture("L6.loop");
    let t = tuple_file("component y + 1\ncomponent x\n");
    let (code, r) = run_json(&["bound", path(&l6), "--tuple", t.path().to_str().unwrap(), "--x0", "x=1,y=3"]);
    assert_eq!(code, 0);
    let b = r.bound.unwrap();
    assert_eq!(b.mu, vec![vec!["1".to_string()]]);
    assert_eq!(b.c, ["1", "4"]);
    assert_eq!(b.d, ["1", "1/2"]);
    assert_eq!(b.coefficient, "8");
    assert_eq!(b.numeric.as_deref(), Some("32"));
    assert_eq!(b.iterations, Some(32));
}

#[test]
fn invalid_check_has_witness() {
    let l2 = fixture("L2.loop");
    let t = tuple_file("component 4y\ncomponent 4x - 4z + 4\n");
    let tp = t.path().to_str().unwrap();
    let (code, r) = run_json(&["check", path(&l2), "--tuple", tp, "--kind", "mlrf"]);
    assert_eq!(code, 1);
    assert_eq!(r.status, Status::Invalid);
    let w = r.witness.unwrap();
    assert_eq!(w.keys().collect::<Vec<_>>(), ["x", "y", "z", "x'", "y'", "z'"]);

    let (code, r) = run_json(&["check", path(&l2), "--tuple", tp, "--kind", "bms"]);
    assert_eq!((code, r.status), (0, Status::Valid));

    let (code, r) = run_json(&["convert", path(&l2), "--tuple", tp]);
    assert_eq!((code, r.status), (0, Status::Found));
    assert!(r.depth.unwrap() <= 2);
}

#[test]
fn nested_conversion_and_check() {
    let l1 = fixture("L1.loop");
    let t = tuple_file("component z + 1\ncomponent y + 1\ncomponent x\n");
    let tp = t.path().to_str().unwrap();
    let (code, _) = run_json(&["check", path(&l1), "--tuple", tp, "--kind", "nested"]);
    assert_eq!(code, 1);
    let (code, r) = run_json(&["convert", path(&l1), "--tuple", tp, "--to", "nested"]);
    assert_eq!(code, 0);
    assert_eq!(r.certificates.len(), r.tuple.len() + 1);
}

#[test]
fn simulate_writes_trace() {
    let l6 = fixture("L6.loop");
    let t = tuple_file("component y + 1\ncomponent x\n");
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trace.csv");
    let (code, r) = run_json(&[
        "simulate",
        path(&l6),
        "--x0",
        "x=1,y=3",
        "--tuple",
        t.path().to_str().unwrap(),
        "--trace-out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(r.steps, Some(8));
    assert_eq!(r.outcome.as_deref(), Some("terminated"));
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.starts_with("step,x,y,f1,f2\n0,1,3,4,1\n"));

    let bad = tuple_file("component -1\n");
    let (code, r) = run_json(&["simulate", path(&l6), "--x0", "x=1,y=3", "--tuple", bad.path().to_str().unwrap()]);
    assert_eq!((code, r.status), (1, Status::Invalid));
}

#[test]
fn usage_errors_exit_two() {
    let l6 = fixture("L6.loop");
    assert_eq!(run(&["synth", "/does/not/exist.loop"]).0, 2);
    assert_eq!(run(&["synth"]).0, 2);
    assert_eq!(run(&["simulate", path(&l6), "--x0", "x=1"]).0, 2);
    assert_eq!(run(&["simulate", path(&l6), "--x0", "x=1,y=2,w=3"]).0, 2);
    let t = tuple_file("component y +\n");
    let (code, _, err) = run(&["check", path(&l6), "--tuple", t.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("1:"), "{err}");
    let broken = tuple_file("vars x\nguard x >= 0\nupdate x' = y\n");
    assert_eq!(run(&["synth", broken.path().to_str().unwrap()]).0, 2);
}

#[test]
fn every_fixture_has_a_definite_answer() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures");
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        for domain in ["rat", "int"] {
            let (code, r) = run_json(&["synth", path(&p), "--domain", domain]);
            assert_eq!(code, r.status.exit_code(), "{}", p.display());
        }
    }
}
