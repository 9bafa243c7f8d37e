//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use convex_boolean_cli::config::RawConfig;
use convex_boolean_cli::scan::{distance_scan, family_prefactor};
use convex_boolean_cli::suites::{run_suite, Scale};

const BIN: &str = env!("CARGO_BIN_EXE_convex-boolean");

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite(name: &str, limit_s: f64) -> Outcome {
    let r = run_suite(name, &Scale::full(), 0, 1e-9).expect("known suite");
    let fast = r.seconds < limit_s;
    Outcome {
        pass: r.passed() && fast,
        detail: format!(
            "{} checks, {} failures, {:.1} s{}{}{}",
            r.checks,
            r.failures,
            r.seconds,
            if limit_s.is_finite() { format!(" (limit {limit_s} s)") } else { String::new() },
            if r.note.is_empty() { "" } else { ": " },
            r.note
        ),
    }
}

fn distance_trend() -> Outcome {
    let text = "family = long_short\nd = 2\nalpha = 1.5\nu = 1\nseparations = 100,1000,10000\n\
                engine = lazy\ncap = 10000\nreplicas = 200\nmin_connected = 200\nseed = 8";
    let cfg = RawConfig::parse(text).unwrap().resolve().unwrap();
    let t = Instant::now();
    let scan = match distance_scan(&cfg) {
        Ok(s) => s,
        Err(e) => return Outcome { pass: false, detail: e.to_string() },
    };
    let prefactor = family_prefactor(&cfg).unwrap();
    let (lo, hi) = (0.1 * prefactor, 10.0 * prefactor);
    let medians: Vec<f64> = scan.summary.iter().map(|c| c.median.unwrap_or(f64::NAN)).collect();
    let enough = scan.summary.iter().all(|c| c.connected >= 200);
    let monotone = medians.windows(2).all(|w| w[0] <= w[1]);
    let last = scan.summary.last().unwrap();
    let ratio = medians[2] / last.loglog.unwrap();
    let in_band = (lo..=hi).contains(&ratio);
    let cells: Vec<String> = scan
        .summary
        .iter()
        .map(|c| format!("|x|={} median {} ({}/{} connected)", c.separation, c.median.unwrap_or(f64::NAN), c.connected, c.replicas))
        .collect();
    Outcome {
        pass: enough && monotone && in_band,
        detail: format!(
            "{}; median/loglog at 1e4 = {ratio:.4}, band [0.1, 10] x {prefactor:.4} = [{lo:.4}, {hi:.4}]; {:.0} s",
            cells.join(", "),
            t.elapsed().as_secs_f64()
        ),
    }
}

fn scan_jsonl(dir: &Path, seed: u64) -> Vec<u8> {
    let status = Command::new(BIN)
        .args(["--seed", &seed.to_string(), "--out"])
        .arg(dir)
        .args(["distance-scan", "--set", "window=80", "--set", "separations=5,10,20", "--set", "cap=15"])
        .args(["--set", "u=0.5", "--set", "replicas=8"])
        .status()
        .expect("binary runs");
    assert!(status.success());
    std::fs::read(dir.join("records.jsonl")).unwrap()
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let a = scan_jsonl(&tmp.path().join("a"), 11);
    let b = scan_jsonl(&tmp.path().join("b"), 11);
    let c = scan_jsonl(&tmp.path().join("c"), 12);
    Outcome {
        pass: !a.is_empty() && a == b && a != c,
        detail: format!(
            "same seed identical: {}, other seed differs: {} ({} bytes)",
            a == b,
            a != c,
            a.len()
        ),
    }
}

fn main() -> ExitCode {
    let criteria: Vec<(usize, &str, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "geometry oracle", Box::new(|| suite("geometry", 60.0))),
        (2, "inscribed box", Box::new(|| suite("inscribed", 60.0))),
        (3, "diameter sequences", Box::new(|| suite("diameters", f64::INFINITY))),
        (4, "tail laws", Box::new(|| suite("tails", 120.0))),
        (5, "graph oracle", Box::new(|| suite("graph", 120.0))),
        (6, "theory calculator", Box::new(|| suite("theory", f64::INFINITY))),
        (7, "monotone coupling", Box::new(|| suite("coupling", 600.0))),
        (8, "distance trend", Box::new(distance_trend)),
        (9, "path events", Box::new(|| suite("paths", f64::INFINITY))),
        (10, "determinism", Box::new(determinism)),
    ];
    let mut all = true;
    for (n, name, run) in criteria {
        let o = run();
        all &= o.pass;
        println!("criterion {n} ({name}): {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
