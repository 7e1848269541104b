use std::path::{Path, PathBuf};

use partobs_cli::{run_with, Outcome};

fn fixture(name: &str) -> String {
    fixture_path(name).display().to_string()
}

fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.des"))
}

fn run(args: &[&str]) -> Outcome {
    let mut argv = vec!["partobs"];
    argv.extend_from_slice(args);
    run_with(argv, false)
}

#[test]
fn estimates() {
    let out = run(&["estimate", "current", &fixture("F1"), "--obs", "a b"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "2 3\n"));
    let out = run(&[
        "estimate",
        "initial",
        &fixture("F5"),
        "--obs",
        "a",
        "--method",
        "rev",
    ]);
    assert_eq!(out.stdout, "0 2\n");
    let out = run(&[
        "estimate",
        "delayed",
        &fixture("F6"),
        "--obs",
        "a b",
        "--split-at",
        "1",
    ]);
    assert_eq!(out.stdout, "1\n");
    let out = run(&[
        "estimate",
        "delayed",
        &fixture("F6"),
        "--obs",
        "a",
        "--split-at",
        "2",
    ]);
    assert_eq!(out.code, 2);
    let out = run(&["estimate", "current", &fixture("F1"), "--obs", "a u"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("not observable"), "{}", out.stderr);
}

#[test]
fn verdict_reports() {
    let out = run(&["verify", "diagnosability", &fixture("F2a")]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.starts_with("diagnosability: VIOLATED\nwitness:"));
    assert!(out.stdout.contains("(n1,f1)"));
    let out = run(&["verify", "opacity-current", &fixture("F3a")]);
    assert_eq!(out.stdout, "opacity-current: HOLDS\n");
    let out = run(&[
        "verify",
        "distinguishability",
        &fixture("F4"),
        "--spec",
        "1 0, 1 3",
    ]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.starts_with("warning:"));
    let out = run(&[
        "verify",
        "distinguishability",
        &fixture("F4"),
        "--spec",
        "1 0 3",
    ]);
    assert_eq!(out.code, 2);
}

#[test]
fn coloring_is_opt_in() {
    let argv = ["partobs", "verify", "opacity-current", &fixture("F3b")];
    let plain = run_with(argv, false);
    let colored = run_with(argv, true);
    assert!(!plain.stdout.contains('\x1b'));
    assert!(colored.stdout.contains("\x1b[31mVIOLATED\x1b[0m"));
    assert_eq!(plain.code, colored.code);
}

#[test]
fn build_outputs() {
    let out = run(&["build", "observer", &fixture("F1")]);
    assert_eq!(out.stdout, "q0 {0,1}\nq1 {2,3}\nq0 a q1\nq1 b q1\n");
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("obs.dot");
    let out = run(&[
        "build",
        "observer",
        &fixture("F1"),
        "--dot",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0);
    let dot = std::fs::read_to_string(&target).unwrap();
    assert!(dot.starts_with("digraph") && dot.contains("\"{2,3}\""));
    let out = run(&["build", "reverse", &fixture("F3b")]);
    assert!(out.stdout.contains("initial: 0 1\n"));
    let out = run(&["build", "twin-plant", &fixture("F2a")]);
    assert!(out.stdout.contains("(n0,n0) (ε,f) (n0,f1)\n"));
    let out = run(&["build", "augment", &fixture("F1"), "--dot", "-"]);
    assert!(out.stdout.contains("\"(0,3)\""));
}

#[test]
fn json_models_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let g = partobs::fixtures::load("F2a");
    let path = dir.path().join("f2a.json");
    std::fs::write(&path, partobs::io::json::serialize(&g)).unwrap();
    let out = run(&[
        "verify",
        "diagnosability",
        path.to_str().unwrap(),
        "--method",
        "observer",
    ]);
    assert_eq!(out.code, 1);
}

#[test]
fn usage_errors() {
    assert_eq!(run(&[]).code, 2);
    assert_eq!(run(&["verify"]).code, 2);
    assert_eq!(run(&["build", "nonsense", &fixture("F1")]).code, 2);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("check-assumptions"));
}

#[test]
fn oracle_reports() {
    let out = run(&[
        "oracle",
        "falsify",
        "diagnosability",
        &fixture("F2b"),
        "--bound",
        "6",
    ]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("no counterexample"));
    let out = run(&[
        "oracle",
        "falsify",
        "opacity-initial",
        &fixture("F5"),
        "--bound",
        "3",
        "--secret",
        "2",
    ]);
    assert_eq!(out.code, 1);
}
