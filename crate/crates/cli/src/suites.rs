//! Oracle suites behind `validate` and the acceptance run.
//!
//! The tolerance handed to the geometry, inscribed and graph suites goes to the
//! predicate under test only; oracles keep their nominal tolerance, so a negative
//! tolerance must produce failures.

use std::time::Instant;

use convex_boolean::geometry::{diameter_sequence, inscribed_box, intersects, ConvexBody, Shape, Vector, DEFAULT_TOL};
use convex_boolean::grains::{hash64, FamilyKind, GrainFamily, SeededRng, TailLaw};
use convex_boolean::graph::{bfs_distances, build_graph_with_tol, coupled_theta_indicators};
use convex_boolean::oracles::{
    brute_force_diameters, brute_force_edges, cross_polytope_contains, exponent_scan, floyd_warshall,
    random_body, random_box, random_exponents, random_rotation, sat_box_separation, support_separation,
};
use convex_boolean::process::{build_index, configuration_from_bodies, Configuration, TruncationPolicy, Window};
use convex_boolean::theory::{
    check_path_event, classify_regime, kappa_and_prefactor, planted_configuration, revalidate, robust_set_m,
    ModelExponents,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const SUITES: &[&str] = &["geometry", "inscribed", "diameters", "tails", "graph", "theory", "paths", "coupling"];

/// Problem sizes of every suite.
#[derive(Clone, Debug)]
pub struct Scale {
    pub body_pairs: usize,
    pub boxes_per_dim: usize,
    pub polytopes: usize,
    pub tail_samples: usize,
    pub graph_configs: usize,
    pub graph_points: usize,
    pub distance_graphs: usize,
    pub distance_points: usize,
    pub exponent_vectors: usize,
    pub path_configs: usize,
    pub coupling_window: f64,
    pub coupling_seeds: usize,
    pub coupling_quantile: f64,
}

impl Scale {
    /// Sizes for a quick check from the command line.
    pub fn desk() -> Self {
        Scale {
            coupling_window: 100.0,
            coupling_seeds: 100,
            coupling_quantile: 1.0 - 1e-3,
            ..Scale::full()
        }
    }

    /// Sizes of the acceptance run.
    pub fn full() -> Self {
        Scale {
            body_pairs: 1000,
            boxes_per_dim: 1000,
            polytopes: 500,
            tail_samples: 1_000_000,
            graph_configs: 100,
            graph_points: 300,
            distance_graphs: 100,
            distance_points: 200,
            exponent_vectors: 10_000,
            path_configs: 100,
            coupling_window: 200.0,
            coupling_seeds: 200,
            coupling_quantile: 1.0 - 1e-4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: usize,
    pub seconds: f64,
    /// First failure, or a measured value worth showing.
    pub note: String,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

/// Counts checks and keeps the first failure message.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: usize,
    note: String,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            if self.failures == 0 {
                self.note = msg();
            }
            self.failures += 1;
        }
    }

    fn note(&mut self, msg: String) {
        if self.failures == 0 {
            self.note = msg;
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        if other.failures > 0 && self.failures == 0 {
            self.note = other.note;
        }
        self.failures += other.failures;
    }
}

fn rng(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(hash64(seed, tag))
}

pub fn run_suite(name: &str, scale: &Scale, seed: u64, tol: f64) -> Option<SuiteReport> {
    let start = Instant::now();
    let (name, t) = match name {
        "geometry" => ("geometry", geometry(scale, seed, tol)),
        "inscribed" => ("inscribed", inscribed(scale, seed, tol)),
        "diameters" => ("diameters", diameters(scale, seed)),
        "tails" => ("tails", tails(scale, seed)),
        "graph" => ("graph", graph(scale, seed, tol)),
        "theory" => ("theory", theory(scale, seed)),
        "paths" => ("paths", paths(scale, seed)),
        "coupling" => ("coupling", coupling(scale, seed)),
        _ => return None,
    };
    Some(SuiteReport {
        name,
        checks: t.checks,
        failures: t.failures,
        seconds: start.elapsed().as_secs_f64(),
        note: t.note,
    })
}

fn geometry(scale: &Scale, seed: u64, tol: f64) -> Tally {
    let mut t = Tally::default();
    for d in 2..=3 {
        let mut g = rng(seed, d as u64);
        let mut done = 0;
        while done < scale.body_pairs {
            let a = random_body(&mut g, d, 2.5);
            let b = random_body(&mut g, d, 2.5);
            let sep = support_separation(&a, &b);
            if sep.abs() < 1e-6 {
                continue;
            }
            let got = intersects(&a, &b, tol);
            t.check(matches!(got, Ok(x) if x == (sep <= DEFAULT_TOL)), || {
                format!("d={d}: intersects {got:?} but separation {sep:e}")
            });
            done += 1;
        }
        done = 0;
        while done < scale.body_pairs {
            let a = random_box(&mut g, d, 2.5);
            let b = random_box(&mut g, d, 2.5);
            let sep = sat_box_separation(&a, &b);
            if sep.abs() < 1e-6 {
                continue;
            }
            let got = intersects(&a, &b, tol);
            t.check(matches!(got, Ok(x) if x == (sep <= 0.0)), || {
                format!("d={d} boxes: intersects {got:?} but SAT gap {sep:e}")
            });
            done += 1;
        }
    }
    t
}

fn random_lengths<R: Rng>(g: &mut R, d: usize) -> Vec<f64> {
    let mut l: Vec<f64> = (0..d).map(|_| 10f64.powf(g.random_range(-2.0..3.0))).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    l
}

fn inscribed(scale: &Scale, seed: u64, tol: f64) -> Tally {
    let mut t = Tally::default();
    for d in 2..=4 {
        let mut g = rng(seed, 10 + d as u64);
        let factor = 2f64.powi(-2 * (d as i32 - 1));
        for _ in 0..scale.boxes_per_dim {
            let lengths = random_lengths(&mut g, d);
            let rot = random_rotation(&mut g, d);
            let mut center = Vector::zeros(d);
            for i in 0..d {
                center[i] = g.random_range(-10.0..10.0);
            }
            let b = match inscribed_box(&lengths, &rot.columns(), &center) {
                Ok(b) => b,
                Err(e) => {
                    t.check(false, || format!("d={d}: {e}"));
                    continue;
                }
            };
            let Shape::OrientedBox { half_sides } = b.shape() else {
                t.check(false, || "not a box".into());
                continue;
            };
            let exact = (0..d).all(|i| 2.0 * half_sides[i] == factor * lengths[i]);
            t.check(exact, || format!("d={d}: sides {half_sides:?} for lengths {lengths:?}"));
            for c in b.world_vertices().unwrap_or_default() {
                let local = rot.apply_transpose(&(c - center));
                t.check(cross_polytope_contains(&lengths, &local, tol), || {
                    format!("d={d}: corner {local:?} outside the cross-polytope {lengths:?}")
                });
            }
        }
    }
    t
}

fn diameters(scale: &Scale, seed: u64) -> Tally {
    let mut t = Tally::default();
    let e = ConvexBody::ellipsoid(
        Vector::from_slice(&[3.0, 2.0, 1.0]),
        Vector::zeros(3),
        convex_boolean::geometry::Rotation::identity(3),
    )
    .expect("valid ellipsoid");
    match diameter_sequence(&e) {
        Ok(s) => {
            let ok = s.lengths.iter().zip([6.0, 4.0, 2.0]).all(|(g, w)| ((g - w) / w).abs() <= 1e-4);
            t.check(ok, || format!("ellipsoid (3,2,1) gave {:?}", s.lengths));
        }
        Err(err) => t.check(false, || format!("ellipsoid: {err}")),
    }
    let mut g = rng(seed, 20);
    let mut polytopes = 0;
    while polytopes < scale.polytopes {
        let d = 2 + polytopes % 2;
        let b = random_body(&mut g, d, 1.0);
        let s = match diameter_sequence(&b) {
            Ok(s) => s,
            Err(err) => {
                t.check(false, || format!("{err}"));
                continue;
            }
        };
        t.check(s.lengths.windows(2).all(|w| w[1] <= w[0]), || format!("increasing {:?}", s.lengths));
        let Some(verts) = b.world_vertices() else { continue };
        let want = brute_force_diameters(&verts);
        let ok = s.lengths.iter().zip(&want).all(|(a, w)| (a - w).abs() <= 1e-12 * w.max(1.0));
        t.check(ok, || format!("diameters {:?} vs brute force {want:?}", s.lengths));
        polytopes += 1;
    }
    for d in 2..=4 {
        for _ in 0..scale.polytopes {
            let b = random_body(&mut g, d, 1.0);
            let ok = matches!(diameter_sequence(&b), Ok(s) if s.lengths.windows(2).all(|w| w[1] <= w[0]));
            t.check(ok, || format!("d={d}: sequence not nonincreasing"));
        }
    }
    t
}

fn regression_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn tails(scale: &Scale, seed: u64) -> Tally {
    let mut t = Tally::default();
    let n = scale.tail_samples;
    let law = TailLaw::pareto(1.5, 1.0).expect("valid law");
    let mut g = SeededRng::new(seed, 30).generator();
    let (mut above2, mut above4) = (0usize, 0usize);
    for _ in 0..n {
        let x = law.sample(&mut g);
        above2 += (x >= 2.0) as usize;
        above4 += (x >= 4.0) as usize;
    }
    let ratio = above4 as f64 / above2 as f64;
    let want = 2f64.powf(-1.5);
    t.check((ratio - want).abs() <= 0.02, || format!("Pareto ratio {ratio:.4}, want {want:.4} +/- 0.02"));

    let laws = vec![TailLaw::pareto(1.2, 1.0).unwrap(), TailLaw::pareto(1.3, 1.0).unwrap()];
    let f = GrainFamily::new(FamilyKind::EllipsoidIndependent { d: 2, laws }, 0.05).expect("valid family");
    let want = -f.tail_index_vector()[1];
    let mut g = SeededRng::new(seed, 31).generator();
    let mut d2: Vec<f64> = Vec::with_capacity(n);
    for _ in 0..n {
        match f.sample_grain(&mut g).and_then(|b| diameter_sequence(&b)) {
            Ok(s) => d2.push(s.lengths[1]),
            Err(err) => t.check(false, || format!("{err}")),
        }
    }
    d2.sort_by(f64::total_cmp);
    let pts: Vec<(f64, f64)> = (0..12)
        .map(|k| {
            let x = 2.0 * 10f64.powf(k as f64 / 11.0);
            let above = d2.len() - d2.partition_point(|&v| v < x);
            (x.ln(), (above.max(1) as f64 / d2.len() as f64).ln())
        })
        .collect();
    let slope = regression_slope(&pts);
    t.check((slope - want).abs() <= 0.15, || format!("D2 slope {slope:.3}, want {want} +/- 0.15"));
    t.note(format!("ratio {ratio:.4}, D2 slope {slope:.3}"));
    t
}

fn random_config(seed: u64, d: usize, n: usize) -> Configuration {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    let spread = (n as f64).powf(1.0 / d as f64) * 1.2;
    let bodies: Vec<ConvexBody> = (0..n).map(|_| random_body(&mut g, d, spread)).collect();
    let window = Window::cube(Vector::zeros(d), 2.0 * spread).expect("positive side");
    configuration_from_bodies(&window, bodies, &[]).expect("bodies inside the window")
}

fn graph(scale: &Scale, seed: u64, tol: f64) -> Tally {
    let mut sizes = rng(seed, 40);
    let edge_cases: Vec<(u64, usize, usize)> = (0..scale.graph_configs)
        .map(|i| (hash64(seed, 4000 + i as u64), 2 + i % 2, sizes.random_range(1..=scale.graph_points)))
        .collect();
    let dist_cases: Vec<(u64, usize, usize)> = (0..scale.distance_graphs)
        .map(|i| (hash64(seed, 5000 + i as u64), 2 + i % 2, sizes.random_range(1..=scale.distance_points)))
        .collect();
    let edges: Vec<Tally> = edge_cases
        .par_iter()
        .map(|&(s, d, n)| {
            let mut t = Tally::default();
            let c = random_config(s, d, n);
            let bodies: Vec<ConvexBody> = c.points.iter().map(|p| p.grain.clone()).collect();
            match (build_graph_with_tol(&c, &build_index(&c), tol), brute_force_edges(&bodies, DEFAULT_TOL)) {
                (Ok(g), Ok(want)) => {
                    t.check(g.is_well_formed(), || "graph not symmetric".into());
                    let got = g.edges();
                    t.check(got == want, || format!("d={d} n={n}: {} edges vs {} brute force", got.len(), want.len()));
                }
                (a, b) => t.check(false, || format!("{:?} {:?}", a.err(), b.err())),
            }
            t
        })
        .collect();
    let dists: Vec<Tally> = dist_cases
        .par_iter()
        .map(|&(s, d, n)| {
            let mut t = Tally::default();
            let c = random_config(s, d, n);
            let g = match build_graph_with_tol(&c, &build_index(&c), DEFAULT_TOL) {
                Ok(g) => g,
                Err(e) => {
                    t.check(false, || format!("{e}"));
                    return t;
                }
            };
            let fw = floyd_warshall(g.len(), &g.edges());
            let ok = (0..g.len()).all(|a| match bfs_distances(&g, a) {
                Ok(row) => row.iter().zip(&fw[a]).all(|(x, y)| *x == y.map(|v| v as usize)),
                Err(_) => false,
            });
            t.check(ok, || format!("d={d} n={n}: BFS disagrees with Floyd-Warshall"));
            t
        })
        .collect();
    let mut t = Tally::default();
    edges.into_iter().chain(dists).for_each(|x| t.merge(x));
    t
}

fn theory(scale: &Scale, seed: u64) -> Tally {
    let mut t = Tally::default();
    let mut g = rng(seed, 60);
    for i in 0..scale.exponent_vectors {
        let d = 2 + i % 5;
        let a = random_exponents(&mut g, d);
        let (l1, l2, dl) = (g.random_bool(0.5), g.random_bool(0.5), g.random_bool(0.3));
        let exp = match ModelExponents::new(d, a.clone()) {
            Ok(e) => e,
            Err(e) => {
                t.check(false, || format!("{a:?}: {e}"));
                continue;
            }
        };
        let want = exponent_scan(d, &a, l1 && l2, dl);
        let report = classify_regime(&exp, l1, l1 && l2, dl);
        let ok = robust_set_m(&exp) == want.m
            && kappa_and_prefactor(&exp) == want.kappa
            && matches!(&report, Ok(r) if r.regime == want.regime && r.robust == want.robust);
        t.check(ok, || format!("calculator disagrees with the scan on {a:?}"));
    }

    let prefactor = |f: &GrainFamily| {
        ModelExponents::new(f.dim(), f.tail_index_vector()).ok().and_then(|e| kappa_and_prefactor(&e))
    };
    let p = |a| TailLaw::pareto(a, 1.0).unwrap();
    for alpha in [1.1, 1.25, 1.5, 1.75, 1.9] {
        let want = 2.0 / (1.0 / (alpha - 1.0f64)).ln();
        let ell = GrainFamily::long_short(2, 1, p(alpha), 0.05).unwrap();
        let got = prefactor(&ell);
        t.check(matches!(got, Some((1, x)) if (x - want).abs() <= 1e-12), || {
            format!("ellipses alpha={alpha}: {got:?} vs {want}")
        });
        let tri = GrainFamily::new(FamilyKind::RightTriangle { law: p(alpha), beta: 0.5 }, 0.05).unwrap();
        let got = prefactor(&tri);
        t.check(matches!(got, Some((1, x)) if (x - want).abs() <= 1e-12), || {
            format!("triangles alpha={alpha}: {got:?} vs {want}")
        });
    }
    for betas in [vec![0.55, 0.8], vec![0.2, 0.4, 0.7], vec![0.2, 0.3, 0.45, 0.9], vec![0.1, 0.15, 0.3, 0.35]] {
        let d = betas.len();
        let f = GrainFamily::new(FamilyKind::EllipsoidDependent { d, betas: betas.clone() }, 0.05).unwrap();
        let got = prefactor(&f);
        let ok = got.is_some_and(|(k, x)| {
            let width = k.min(d - k) as f64;
            (x - 2.0 / (width / (1.0 / betas[d - k] - k as f64)).ln()).abs() <= 1e-12
        });
        t.check(ok, || format!("dependent {betas:?}: {got:?}"));
    }
    t
}

fn paths(scale: &Scale, seed: u64) -> Tally {
    let mut t = Tally::default();
    for i in 0..scale.path_configs {
        let s = hash64(seed, 7000 + i as u64);
        let n = 1 + i % 2;
        match planted_configuration(s, n, false) {
            Ok(p) => {
                let w = check_path_event(&p.config, &p.index, p.start, n, &p.thresholds, p.variant, Some(p.phi));
                let ok = match &w {
                    Ok(Some(w)) => {
                        w.steps.iter().all(|r| r.passed())
                            && matches!(revalidate(&p.config, w, &p.thresholds, p.variant, Some(p.phi)), Ok(true))
                    }
                    _ => false,
                };
                t.check(ok, || format!("planted seed {s}: no valid witness"));
            }
            Err(e) => t.check(false, || format!("{e}")),
        }
        match planted_configuration(s, n, true) {
            Ok(p) => {
                let w = check_path_event(&p.config, &p.index, p.start, n, &p.thresholds, p.variant, Some(p.phi));
                t.check(matches!(w, Ok(None)), || format!("adversarial seed {s}: found a witness"));
            }
            Err(e) => t.check(false, || format!("{e}")),
        }
    }
    t
}

fn coupling(scale: &Scale, seed: u64) -> Tally {
    let family = GrainFamily::long_short(2, 1, TailLaw::pareto(1.5, 1.0).unwrap(), 0.05).unwrap();
    let trunc = TruncationPolicy::clamp(family.first_diameter_quantile(scale.coupling_quantile));
    let window = Window::cube(Vector::zeros(2), scale.coupling_window).unwrap();
    let grid = [0.2, 0.4, 0.6, 0.8, 1.0];
    let rows: Vec<_> = (0..scale.coupling_seeds)
        .into_par_iter()
        .map(|r| coupled_theta_indicators(&window, &grid, &family, &trunc, SeededRng::new(seed, hash64(0, r as u64))))
        .collect();
    let mut t = Tally::default();
    let mut hits = [0usize; 5];
    for (r, row) in rows.into_iter().enumerate() {
        match row {
            Ok(v) => {
                v.iter().enumerate().for_each(|(k, &b)| hits[k] += b as usize);
                t.check(v.windows(2).all(|w| w[0] <= w[1]), || format!("seed {r}: {v:?}"));
            }
            Err(e) => t.check(false, || format!("seed {r}: {e}")),
        }
    }
    t.note(format!("hits per u {hits:?}"));
    t
}
