use std::path::Path;
use std::process::{Command, Output};

use convex_boolean_cli::plot::reference_slope;

const BIN: &str = env!("CARGO_BIN_EXE_convex-boolean");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn kappa_examples() {
    let out = run(&["kappa", "--d", "2", "--alpha", "1.5,inf"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["kappa"], 1);
    assert!((v["prefactor"].as_f64().unwrap() - 2.8854).abs() < 1e-4);
    assert_eq!(v["regime"], "ultrasmall");

    let v = json(&run(&["kappa", "--d", "2", "--alpha", "0.8,inf"]));
    assert_eq!(v["regime"], "faster-than-loglog");
    let v = json(&run(&["kappa", "--d", "2", "--alpha", "5,6", "--vol-l2"]));
    assert_eq!(v["regime"], "slower-than-loglog");
    assert_eq!(v["kappa"], serde_json::Value::Null);
}

#[test]
fn kappa_rejects_bad_vectors() {
    for alpha in ["1.5,x", "2,1", "1.5", "-1,2", ""] {
        let out = run(&["kappa", "--d", "2", "--alpha", alpha]);
        assert_eq!(out.status.code(), Some(2), "{alpha}");
    }
    assert_eq!(run(&["kappa", "--alpha", "1.5,inf"]).status.code(), Some(2));
}

#[test]
fn kappa_from_a_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tri.cfg");
    std::fs::write(&cfg, "family = triangle\nalpha = 1.5\nbeta = 0.5\n").unwrap();
    let out = run(&["kappa", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["alpha"], serde_json::json!([1.5, 3.0]));
    assert_eq!(v["kappa"], 1);
}

fn scan(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["--out", dir.to_str().unwrap(), "distance-scan"];
    for s in ["window=60", "separations=5,10", "cap=12", "u=0.5", "replicas=4"] {
        args.extend(["--set", s]);
    }
    for s in extra {
        args.extend(["--set", s]);
    }
    run(&args)
}

#[test]
fn distance_scan_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = scan(dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["config.resolved", "records.jsonl", "summary.csv", "timings.jsonl"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let records = std::fs::read_to_string(dir.path().join("records.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = records.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 8);
    let hash = &lines[0]["config_hash"];
    assert!(lines.iter().all(|r| &r["config_hash"] == hash && r["cap"] == 12.0));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with(
        "separation,replicas,connected,unresolved,connection_rate,median,q25,q75,loglog,reference\n"
    ));
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let read = |p: &str| std::fs::read(dir.path().join(p).join("records.jsonl")).unwrap();
    scan(&dir.path().join("a"), &[]);
    scan(&dir.path().join("b"), &[]);
    scan(&dir.path().join("c"), &["seed=5"]);
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
    let summary = |p: &str| std::fs::read(dir.path().join(p).join("summary.csv")).unwrap();
    assert_eq!(summary("a"), summary("b"));
}

#[test]
fn empty_process_leaves_the_palms_apart() {
    let dir = tempfile::tempdir().unwrap();
    let out = scan(dir.path(), &["u=0", "replicas=1", "separations=20", "cap=3"]);
    assert!(out.status.success());
    let rec: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(dir.path().join("records.jsonl")).unwrap().trim()).unwrap();
    assert_eq!(rec["status"], "disconnected");
    assert_eq!(rec["distance"], serde_json::Value::Null);
}

#[test]
fn infeasible_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(scan(dir.path(), &["separations=100"]).status.code(), Some(2));
    assert_eq!(scan(dir.path(), &["colour=red"]).status.code(), Some(2));
    assert_eq!(scan(dir.path(), &["engine=lazy", "cap=none"]).status.code(), Some(2));
    let missing = run(&["distance-scan", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn theta_scan_at_zero_intensity() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = run(&[
        "--out", d, "theta-scan", "--set", "u_grid=0,0.5", "--set", "window=40", "--set", "cap=4",
        "--set", "replicas=10",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("theta.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("u,theta_hat,stderr,replicas"));
    assert_eq!(lines.next(), Some("0.0,0.0,0.0,10"));
    let records = std::fs::read_to_string(dir.path().join("records.jsonl")).unwrap();
    for line in records.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let ind: Vec<bool> = v["indicators"].as_array().unwrap().iter().map(|b| b.as_bool().unwrap()).collect();
        assert!(ind.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn validate_passes_and_fails() {
    let out = run(&["validate", "--suite", "inscribed", "--suite", "paths"]);
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("inscribed") && table.contains("paths"));
    assert!(!table.contains("geometry"));

    let bad = run(&["validate", "--suite", "inscribed", "--tolerance", "-1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8(bad.stdout).unwrap().contains("FAIL"));
    assert_eq!(run(&["validate", "--suite", "nothing"]).status.code(), Some(2));
}

#[test]
fn plots() {
    let dir = tempfile::tempdir().unwrap();
    scan(dir.path(), &["separations=5,10,20", "window=80"]);
    let csv = dir.path().join("summary.csv");
    let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
    for svg in [&a, &b] {
        let out = run(&["plot", csv.to_str().unwrap(), "--output", svg.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let svg = std::fs::read_to_string(&a).unwrap();
    assert_eq!(svg, std::fs::read_to_string(&b).unwrap());
    let want = 2.0 / 2f64.ln();
    assert!((reference_slope(&svg).unwrap() - want).abs() < 1e-6);

    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(run(&["plot", empty.to_str().unwrap()]).status.code(), Some(2));
    let junk = dir.path().join("junk.csv");
    std::fs::write(&junk, "separation,loglog,median,reference\n10,x,1,\n").unwrap();
    assert_eq!(run(&["plot", junk.to_str().unwrap()]).status.code(), Some(2));
}
