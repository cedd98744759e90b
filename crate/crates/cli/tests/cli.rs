use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn hubo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hubo-gas"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = hubo(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tri.txt"), "3 3\n0 1\n1 2\n0 2\n").unwrap();
    fs::write(dir.path().join("tsp.txt"), "3\n2 3\n4\n").unwrap();
    fs::write(
        dir.path().join("fig2.poly"),
        "vars 3\n1 * v0 v1 v2\n-1 * !v0 v2\nconst 0\n",
    )
    .unwrap();
    dir
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out/manifest.json")).unwrap()).unwrap()
}

#[test]
fn synth_emits_the_factored_gate_list() {
    let d = setup();
    ok(d.path(), &["synth", "--poly", "fig2.poly", "--m", "3"]);
    let dump = fs::read_to_string(d.path().join("out/circuit.txt")).unwrap();
    let gates: Vec<&str> = dump.lines().skip(1).filter(|l| !l.starts_with('H')).collect();
    assert_eq!(
        gates,
        ["CPHASE a=1 ctrl=0,1,2", "X q0", "CPHASE a=-1 ctrl=0,2", "X q0", "IQFT"]
    );
    assert_eq!(dump.lines().filter(|l| l.starts_with('H')).count(), 6);
}

#[test]
fn formulate_then_verify_every_strategy() {
    let d = setup();
    for s in ["qubo", "asc", "dsc", "pf", "or"] {
        let poly = format!("tri_{s}.poly");
        ok(d.path(), &["formulate", "--problem", "gcp", "--strategy", s, "--in", "tri.txt", "--out", &poly]);
        for y in ["0", "1", "-1"] {
            let out = ok(d.path(), &["simulate", "verify-oracle", "--poly", &format!("out/{poly}"), "--y", y]);
            assert!(out.contains("oracle verified"), "{s} y={y}: {out}");
        }
    }
    let csv = fs::read_to_string(d.path().join("out/oracle.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains(",true,"));
}

#[test]
fn rtof_counts_follow_the_eight_to_fourteen_ratio() {
    let d = setup();
    ok(d.path(), &["formulate", "--problem", "gcp", "--strategy", "asc", "--in", "tri.txt"]);
    ok(d.path(), &["synth", "--poly", "out/gcp_asc.poly"]);
    let metric = |decomp: &str| -> u64 {
        let out = ok(d.path(), &["count", "--circuit", "out/circuit.txt", "--decomp", decomp]);
        out.lines()
            .find_map(|l| l.strip_prefix("t,"))
            .unwrap()
            .parse()
            .unwrap()
    };
    let (t, r) = (metric("toffoli"), metric("rtof"));
    assert!(t > 0);
    assert_eq!(t * 8, r * 14);
}

#[test]
fn grover_table_matches_closed_form() {
    let d = setup();
    ok(d.path(), &["formulate", "--problem", "gcp", "--strategy", "pf", "--in", "tri.txt"]);
    let out = ok(d.path(), &["simulate", "grover", "--poly", "out/gcp_pf.poly", "--y", "1", "--L", "1"]);
    let nums: Vec<&str> = out.split(['=', '(', ')', ' ']).collect();
    let vals: Vec<f64> = nums.iter().filter_map(|w| w.parse().ok()).filter(|v: &f64| v.fract() != 0.0).collect();
    assert!((vals[0] - vals[1]).abs() < 1e-9, "{out}");
    let csv = fs::read_to_string(d.path().join("out/grover_L1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 64);
    let total: f64 = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn manifest_lists_every_output_with_its_digest() {
    let d = setup();
    ok(d.path(), &["encode", "show", "--code", "or", "--indices", "4"]);
    ok(d.path(), &["gas", "run", "--problem", "tsp", "--strategy", "pf", "--in", "tsp.txt", "--trials", "4", "--svg"]);
    ok(d.path(), &["figure", "--figure", "qubits", "--v", "8,12", "--svg"]);
    let m = manifest(d.path());
    let runs = m["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    assert_eq!(runs[1]["seed"], 0);
    let mut listed = vec![];
    for run in runs {
        for o in run["outputs"].as_array().unwrap() {
            let path = o["path"].as_str().unwrap();
            let bytes = fs::read(d.path().join("out").join(path)).unwrap();
            assert_eq!(o["sha256"].as_str().unwrap(), format!("{:x}", Sha256::digest(&bytes)));
            listed.push(path.to_string());
        }
    }
    for entry in fs::read_dir(d.path().join("out")).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        assert!(name == "manifest.json" || listed.contains(&name), "{name} missing from manifest");
    }
    let trace = fs::read_to_string(d.path().join("out/trace.csv")).unwrap();
    assert!(trace.starts_with("trial,step,cum_rotations,y,value_normalized\n"));
}

#[test]
fn figures_are_byte_identical_per_seed() {
    let d = setup();
    let cfg = "figure = convergence\ntrials = 6\nseed = 3\nstrategies = pf, or\nbudget = 500\n";
    fs::write(d.path().join("exp.cfg"), cfg).unwrap();
    ok(d.path(), &["figure", "--config", "exp.cfg", "--out-dir", "a"]);
    ok(d.path(), &["figure", "--config", "exp.cfg", "--out-dir", "b"]);
    for f in ["convergence.csv", "convergence_summary.csv"] {
        let a = fs::read(d.path().join("a").join(f)).unwrap();
        assert_eq!(a, fs::read(d.path().join("b").join(f)).unwrap(), "{f}");
    }
    // a flag beats the config value
    ok(d.path(), &["figure", "--config", "exp.cfg", "--trials", "2", "--out-dir", "c"]);
    let s = fs::read_to_string(d.path().join("c/convergence_summary.csv")).unwrap();
    assert!(s.lines().skip(1).all(|l| l.split(',').nth(2) == Some("2")), "{s}");
}

#[test]
fn errors_exit_nonzero() {
    let d = setup();
    fs::write(d.path().join("bad.txt"), "3 3\n0 7\n").unwrap();
    fs::write(d.path().join("bad.cfg"), "figure = qubits\ncolour = red\n").unwrap();
    for args in [
        &["formulate", "--problem", "gcp", "--strategy", "pf", "--in", "bad.txt"][..],
        &["formulate", "--problem", "tsp", "--strategy", "or", "--in", "tsp.txt"],
        &["formulate", "--problem", "gcp", "--strategy", "pf", "--in", "tri.txt", "--penalty", "bogus=2"],
        &["figure", "--config", "bad.cfg"],
        &["figure", "--figure", "qubits", "--v", "10"],
        &["synth", "--poly", "fig2.poly", "--m", "1"],
        &["encode", "show", "--code", "asc", "--indices", "1"],
    ] {
        let out = hubo(d.path(), args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
}

#[test]
fn encode_table_as_csv() {
    let d = setup();
    ok(d.path(), &["encode", "show", "--code", "gray-pf", "--indices", "8"]);
    let csv = fs::read_to_string(d.path().join("out/code_gray-pf_8.csv")).unwrap();
    let bits: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(bits, ["111", "101", "100", "000", "001", "011", "010", "110"]);
}
