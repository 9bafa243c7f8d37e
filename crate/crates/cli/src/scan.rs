//! Distance and percolation scans over a seeded replica farm.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use convex_boolean::geometry::{Vector, DEFAULT_TOL};
use convex_boolean::grains::{hash64, SeededRng};
use convex_boolean::graph::{build_graph, chemical_distance, components, coupled_theta_indicators, palm_pair, ThetaEstimate};
use convex_boolean::process::{build_index, lazy_chemical_distance, sample_configuration, LazyProcess, SearchOutcome, Window};
use convex_boolean::theory::{kappa_and_prefactor, ModelExponents};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Engine, ExperimentConfig};
use crate::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Connected,
    Disconnected,
    Unresolved,
}

/// One replica of a distance scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub cell: usize,
    pub separation: f64,
    pub replica: usize,
    pub stream: u64,
    pub status: Status,
    pub distance: Option<usize>,
    /// Component sizes of the two Palm points; unknown for the lazy engine.
    pub component_sizes: Option<[usize; 2]>,
    pub realized: usize,
    pub cap: Option<f64>,
    pub engine: String,
    pub version: String,
}

/// Per-separation summary row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub separation: f64,
    pub replicas: usize,
    pub connected: usize,
    pub unresolved: usize,
    pub connection_rate: f64,
    pub median: Option<f64>,
    pub q25: Option<f64>,
    pub q75: Option<f64>,
    pub loglog: Option<f64>,
    pub reference: Option<f64>,
}

pub struct DistanceScan {
    pub records: Vec<RunRecord>,
    pub summary: Vec<CellSummary>,
    /// Wall-clock seconds per cell.
    pub seconds: Vec<f64>,
}

/// Linear-interpolation quantile of sorted data (type 7).
pub fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let (lo, frac) = (h.floor() as usize, h - h.floor());
    let hi = (lo + 1).min(sorted.len() - 1);
    Some(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

/// Theoretical prefactor of the family, if its tail indices give one.
pub fn family_prefactor(cfg: &ExperimentConfig) -> Option<f64> {
    let exp = ModelExponents::new(cfg.family.dim(), cfg.family.tail_index_vector()).ok()?;
    kappa_and_prefactor(&exp).map(|(_, p)| p)
}

/// Rejects configurations whose window cannot hold the experiment.
pub fn check_distance_feasible(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.engine == Engine::Lazy {
        return Ok(());
    }
    let max_sep = cfg.separations.iter().cloned().fold(0.0, f64::max);
    if max_sep > cfg.window / 2.0 {
        return Err(CliError::usage(format!(
            "separation {max_sep} puts a Palm point outside the window of side {}",
            cfg.window
        )));
    }
    let diagonal = cfg.window * (cfg.family.dim() as f64).sqrt();
    let margin = cfg.trunc.margin(&cfg.family);
    if diagonal < max_sep + 2.0 * margin {
        return Err(CliError::usage(format!(
            "window diagonal {diagonal} is below max separation plus twice the margin ({})",
            max_sep + 2.0 * margin
        )));
    }
    Ok(())
}

fn run_replica(cfg: &ExperimentConfig, hash: &str, cell: usize, sep: f64, replica: usize) -> Result<RunRecord> {
    let d = cfg.family.dim();
    let stream = hash64(cell as u64, replica as u64);
    let rng = SeededRng::new(cfg.seed, stream);
    let (status, distance, component_sizes, realized) = match cfg.engine {
        Engine::Window => {
            let window = Window::cube(Vector::zeros(d), cfg.window)?;
            let palms = palm_pair(&window.center(), sep);
            let config = sample_configuration(&window, cfg.u, &cfg.family, &cfg.trunc, &palms, rng)?;
            let graph = build_graph(&config, &build_index(&config))?;
            let ids = config.palm_ids();
            let dist = chemical_distance(&graph, ids[0], ids[1])?;
            let labels = components(&graph);
            let sizes = [labels.size_of(ids[0]), labels.size_of(ids[1])];
            let status = if dist.is_some() { Status::Connected } else { Status::Disconnected };
            (status, dist, Some(sizes), config.len())
        }
        Engine::Lazy => {
            let mut p = LazyProcess::new(&cfg.family, cfg.trunc, vec![cfg.u], rng, None, DEFAULT_TOL)?;
            let palms = palm_pair(&Vector::zeros(d), sep);
            let a = p.add_palm(palms[0])?;
            let b = p.add_palm(palms[1])?;
            let (status, dist) = match lazy_chemical_distance(&mut p, a, b, 0, cfg.node_budget)? {
                SearchOutcome::Connected(n) => (Status::Connected, Some(n)),
                SearchOutcome::Disconnected => (Status::Disconnected, None),
                SearchOutcome::Unresolved => (Status::Unresolved, None),
            };
            (status, dist, None, p.realized())
        }
    };
    Ok(RunRecord {
        config_hash: hash.to_string(),
        cell,
        separation: sep,
        replica,
        stream,
        status,
        distance,
        component_sizes,
        realized,
        cap: cfg.trunc.cap,
        engine: cfg.engine.name().to_string(),
        version: VERSION.to_string(),
    })
}

/// Replicas of one cell. With `min_connected > 0`, batches of `replicas` run until
/// that many replicas connect (or `max_replicas` is reached) and the records are cut
/// to the shortest prefix that holds them, so the result does not depend on batching.
fn run_cell(cfg: &ExperimentConfig, hash: &str, cell: usize, sep: f64) -> Result<Vec<RunRecord>> {
    let mut records: Vec<RunRecord> = Vec::new();
    let target = cfg.min_connected;
    loop {
        let start = records.len();
        let end = if target == 0 { cfg.replicas } else { (start + cfg.replicas).min(cfg.max_replicas.max(cfg.replicas)) };
        let batch: Vec<RunRecord> = (start..end)
            .into_par_iter()
            .map(|r| run_replica(cfg, hash, cell, sep, r))
            .collect::<Result<_>>()?;
        records.extend(batch);
        if target == 0 || end == start {
            break;
        }
        let connected = records.iter().filter(|r| r.status == Status::Connected).count();
        if connected >= target {
            let mut seen = 0;
            let cut = records
                .iter()
                .position(|r| {
                    seen += (r.status == Status::Connected) as usize;
                    seen == target
                })
                .unwrap();
            records.truncate((cut + 1).max(cfg.replicas));
            break;
        }
    }
    Ok(records)
}

fn summarize(sep: f64, records: &[RunRecord], prefactor: Option<f64>) -> CellSummary {
    let mut dist: Vec<f64> = records.iter().filter_map(|r| r.distance.map(|x| x as f64)).collect();
    dist.sort_by(f64::total_cmp);
    let n = records.len();
    let unresolved = records.iter().filter(|r| r.status == Status::Unresolved).count();
    let ll = sep.ln().ln();
    let loglog = (sep > std::f64::consts::E).then_some(ll);
    CellSummary {
        separation: sep,
        replicas: n,
        connected: dist.len(),
        unresolved,
        connection_rate: dist.len() as f64 / n as f64,
        median: quantile(&dist, 0.5),
        q25: quantile(&dist, 0.25),
        q75: quantile(&dist, 0.75),
        loglog,
        reference: loglog.zip(prefactor).map(|(l, p)| p * l),
    }
}

/// Runs every cell of the separation grid. Cell `c`, replica `r` uses the stream
/// `hash64(c, r)` under the master seed.
pub fn distance_scan(cfg: &ExperimentConfig) -> Result<DistanceScan> {
    check_distance_feasible(cfg)?;
    let hash = cfg.hash();
    let prefactor = family_prefactor(cfg);
    let mut out = DistanceScan { records: Vec::new(), summary: Vec::new(), seconds: Vec::new() };
    for (cell, &sep) in cfg.separations.iter().enumerate() {
        let t = Instant::now();
        let recs = run_cell(cfg, &hash, cell, sep)?;
        out.seconds.push(t.elapsed().as_secs_f64());
        out.summary.push(summarize(sep, &recs, prefactor));
        out.records.extend(recs);
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for it in items {
        serde_json::to_writer(&mut w, it)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CellTiming {
    cell: usize,
    seconds: f64,
}

/// Writes `config.resolved`, `records.jsonl`, `summary.csv` and `timings.jsonl`.
pub fn write_distance_scan(cfg: &ExperimentConfig, scan: &DistanceScan, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.resolved"), cfg.canonical_text())?;
    write_jsonl(&dir.join("records.jsonl"), &scan.records)?;
    write_csv(&dir.join("summary.csv"), &scan.summary)?;
    let timings: Vec<CellTiming> =
        scan.seconds.iter().enumerate().map(|(cell, &seconds)| CellTiming { cell, seconds }).collect();
    write_jsonl(&dir.join("timings.jsonl"), &timings)
}

/// Coupled indicators of one theta-scan replica.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaRecord {
    pub config_hash: String,
    pub replica: usize,
    pub stream: u64,
    pub u_grid: Vec<f64>,
    pub indicators: Vec<bool>,
    pub window: f64,
    pub cap: Option<f64>,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaRow {
    pub u: f64,
    pub theta_hat: f64,
    pub stderr: f64,
    pub replicas: usize,
}

pub struct ThetaScan {
    pub records: Vec<ThetaRecord>,
    pub rows: Vec<ThetaRow>,
}

/// Boundary-reaching scan over the intensity grid. Replica `r` uses the stream
/// `hash64(0, r)`, and all intensities share it by superposition.
pub fn theta_scan(cfg: &ExperimentConfig) -> Result<ThetaScan> {
    let hash = cfg.hash();
    let window = Window::cube(Vector::zeros(cfg.family.dim()), cfg.window)?;
    let records: Vec<ThetaRecord> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            let stream = hash64(0, r as u64);
            let rng = SeededRng::new(cfg.seed, stream);
            let indicators = coupled_theta_indicators(&window, &cfg.u_grid, &cfg.family, &cfg.trunc, rng)?;
            Ok(ThetaRecord {
                config_hash: hash.clone(),
                replica: r,
                stream,
                u_grid: cfg.u_grid.clone(),
                indicators,
                window: cfg.window,
                cap: cfg.trunc.cap,
                version: VERSION.to_string(),
            })
        })
        .collect::<Result<_>>()?;
    let rows = cfg
        .u_grid
        .iter()
        .enumerate()
        .map(|(k, &u)| {
            let hits = records.iter().filter(|r| r.indicators[k]).count();
            let e = ThetaEstimate::from_hits(u, hits, cfg.replicas);
            ThetaRow { u, theta_hat: e.theta, stderr: e.stderr, replicas: e.replicas }
        })
        .collect();
    Ok(ThetaScan { records, rows })
}

/// Writes `config.resolved`, `records.jsonl` and `theta.csv`.
pub fn write_theta_scan(cfg: &ExperimentConfig, scan: &ThetaScan, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.resolved"), cfg.canonical_text())?;
    write_jsonl(&dir.join("records.jsonl"), &scan.records)?;
    write_csv(&dir.join("theta.csv"), &scan.rows)
}
