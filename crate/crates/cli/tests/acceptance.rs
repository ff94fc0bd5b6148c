//! End-to-end checks of the binary: determinism of machine-readable output
//! for a fixed seed, and the exit-status contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn atm() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs/atm.mini")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathgen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_identical(args: &[&str]) {
    let first = run(args);
    let second = run(args);
    assert!(
        matches!(first.status.code(), Some(0) | Some(1)),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&first.stderr)
    );
    assert_eq!(
        first.stdout, second.stdout,
        "[criterion 8] fail: output of {args:?} not byte-identical"
    );
    assert_eq!(first.status, second.status);
}

#[test]
fn criterion_8_determinism() {
    let atm = atm();
    let atm = atm.to_str().unwrap();
    assert_identical(&["cfg", atm, "--json"]);
    assert_identical(&["cfg", atm, "--dot", "-"]);
    assert_identical(&["paths", atm, "--json"]);
    assert_identical(&[
        "generate", atm, "--json", "--seed", "2", "--early-stop", "--mode", "paper",
    ]);
    assert_identical(&[
        "generate", atm, "--json", "--seed", "3", "--early-stop", "--target", "2",
    ]);

    // artifacts on disk are byte-identical as well
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let s = run(&[
            "generate",
            atm,
            "--seed",
            "0",
            "--early-stop",
            "--mode",
            "paper",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(s.status.success());
    }
    for name in ["predicate_5.json", "predicate_5_stats.csv"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "[criterion 8] fail: artifact {name} differs");
    }

    // report over a saved artifact is deterministic too
    let artifact = out_a.join("predicate_5.json");
    assert_identical(&["report", artifact.to_str().unwrap(), "--json"]);
    assert_identical(&[
        "report",
        artifact.to_str().unwrap(),
        "--source",
        "all",
        "--json",
    ]);
    println!("[criterion 8] pass — repeated runs are byte-identical for fixed seeds");
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // 2: unparseable program
    let bad = dir.path().join("bad.mini");
    write(&bad, "input x in [0,9]; if x < 2 and x > 1 { y := 1; }");
    let out = run(&["cfg", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    // 2: usage error (unknown flag), handled by the argument parser
    let out = run(&["cfg", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(2));

    // 2: malformed artifact
    let junk = dir.path().join("junk.json");
    write(&junk, "{ not json ");
    let out = run(&["report", junk.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // 1: target stays uncovered when the budget cannot reach it
    let prog = dir.path().join("needle.mini");
    write(
        &prog,
        "input x in [0, 30000]; if x = 29999 { record hit x; }",
    );
    let config = dir.path().join("tiny.toml");
    write(&config, "population_size = 4\nmax_generations = 0\n");
    let out = run(&[
        "generate",
        prog.to_str().unwrap(),
        "--target",
        "0",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // 0: covered target
    let out = run(&[
        "generate",
        atm().to_str().unwrap(),
        "--seed",
        "0",
        "--early-stop",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn compare_reports_both_methods() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.toml");
    std::fs::write(&config, "population_size = 20\nmax_generations = 10\n").unwrap();
    let out_file = dir.path().join("cmp.json");
    let out = run(&[
        "compare",
        atm().to_str().unwrap(),
        "--target",
        "1",
        "--seeds",
        "1,2,3",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_file.to_str().unwrap(),
        "--json",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&out_file).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["seeds"], serde_json::json!([1, 2, 3]));
    assert!(parsed["ga"]["success_rate"].is_number());
    assert!(parsed["random"]["success_rate"].is_number());

    // a single seed is a usage error
    let out = run(&[
        "compare",
        atm().to_str().unwrap(),
        "--target",
        "1",
        "--seeds",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
