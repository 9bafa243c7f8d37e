use convex_boolean::geometry::{ConvexBody, Vector, DEFAULT_TOL};
use convex_boolean::grains::{GrainFamily, SeededRng, TailLaw};
use convex_boolean::graph::{
    bfs_distances, build_graph, chemical_distance, components, graph_from_bodies, theta_hat,
    theta_scan, theta_scan_indicators, IntersectionGraph,
};
use convex_boolean::oracles::{brute_force_edges, floyd_warshall, random_body};
use convex_boolean::process::{
    build_index, configuration_from_bodies, sample_configuration, Configuration,
    TruncationPolicy, Window,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_config(seed: u64, d: usize, n: usize) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = (n as f64).powf(1.0 / d as f64) * 1.2;
    let bodies: Vec<ConvexBody> = (0..n).map(|_| random_body(&mut rng, d, spread)).collect();
    let window = Window::cube(Vector::zeros(d), 2.0 * spread).unwrap();
    configuration_from_bodies(&window, bodies, &[]).unwrap()
}

fn ellipses() -> GrainFamily {
    GrainFamily::long_short(2, 1, TailLaw::pareto(1.5, 1.0).unwrap(), 0.05).unwrap()
}

fn ball(x: f64, r: f64) -> ConvexBody {
    ConvexBody::ball(Vector::from_slice(&[x, 0.0]), r).unwrap()
}

#[test]
fn small_graphs() {
    let g = graph_from_bodies(&[], DEFAULT_TOL).unwrap();
    assert!(g.is_empty());
    assert_eq!(components(&g).count(), 0);

    let w = Window::cube(Vector::zeros(2), 20.0).unwrap();
    let c = configuration_from_bodies(&w, vec![ball(0.0, 5.0), ball(1.0, 5.0)], &[true, true])
        .unwrap();
    let g = build_graph(&c, &build_index(&c)).unwrap();
    assert_eq!(g.edges(), vec![(0, 1)]);

    let chain = graph_from_bodies(&[ball(0.0, 1.0), ball(1.5, 1.0), ball(3.0, 1.0)], DEFAULT_TOL)
        .unwrap();
    assert_eq!(chain.edges(), vec![(0, 1), (1, 2)]);
    assert_eq!(chemical_distance(&chain, 0, 2).unwrap(), Some(2));
    assert_eq!(chemical_distance(&chain, 1, 1).unwrap(), Some(0));
    assert!(chemical_distance(&chain, 0, 3).is_err());
    let labels = components(&chain);
    assert_eq!((labels.count(), labels.size_of(0)), (1, 3));

    let mut out = Vec::new();
    chain.write_edge_list(&mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "0 1\n1 2\n");
}

#[test]
fn theta_extremes() {
    let w = Window::cube(Vector::zeros(2), 40.0).unwrap();
    let bounded = GrainFamily::long_short(2, 1, TailLaw::degenerate(3.0).unwrap(), 0.05).unwrap();
    let t = TruncationPolicy::clamp(3.0);
    let est = theta_hat(&w, 0.0, &bounded, &t, 20, SeededRng::new(0, 0)).unwrap();
    assert_eq!((est.theta, est.stderr), (0.0, 0.0));

    let huge = GrainFamily::long_short(2, 1, TailLaw::degenerate(200.0).unwrap(), 0.05).unwrap();
    let est = theta_hat(&w, 0.0, &huge, &TruncationPolicy::none(), 20, SeededRng::new(0, 0)).unwrap();
    assert_eq!(est.theta, 1.0);

    assert!(theta_hat(&w, 0.5, &bounded, &t, 0, SeededRng::new(0, 0)).is_err());
}

#[test]
fn theta_stderr_is_binomial() {
    let w = Window::cube(Vector::zeros(2), 30.0).unwrap();
    let est = theta_scan(&w, &[0.3, 0.6], &ellipses(), &TruncationPolicy::clamp(20.0), 40, SeededRng::new(4, 0))
        .unwrap();
    for e in est {
        assert_eq!(e.theta, e.hits as f64 / 40.0);
        assert!((e.stderr - (e.theta * (1.0 - e.theta) / 40.0).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn coupled_indicators_are_monotone() {
    let w = Window::cube(Vector::zeros(2), 40.0).unwrap();
    let grid = [0.2, 0.4, 0.6, 0.8, 1.0];
    let capped = TruncationPolicy::clamp(30.0);
    let uncapped = TruncationPolicy::none();
    let f = GrainFamily::long_short(2, 1, TailLaw::pareto(3.0, 1.0).unwrap(), 0.05).unwrap();
    for (fam, t) in [(ellipses(), capped), (f, uncapped)] {
        let ind = theta_scan_indicators(&w, &grid, &fam, &t, 40, SeededRng::new(6, 0)).unwrap();
        let mut rising = 0;
        for row in &ind {
            assert!(row.windows(2).all(|p| p[0] <= p[1]), "{row:?}");
            rising += (row[0] != row[4]) as usize;
        }
        assert!(rising > 0 || ind.iter().all(|r| r[0]));
    }
}

#[test]
fn edge_count_grows_with_the_cap() {
    let w = Window::cube(Vector::zeros(2), 40.0).unwrap();
    let f = ellipses();
    let caps = [2.0, 5.0, 10.0, 20.0, 40.0];
    let inner = w.inflate(caps[0] / 2.0);
    for seed in 0..10 {
        let mut last = 0;
        for &cap in &caps {
            let c = sample_configuration(&w, 0.8, &f, &TruncationPolicy::clamp(cap), &[], SeededRng::new(seed, 0))
                .unwrap();
            let kept: Vec<ConvexBody> = c
                .points
                .iter()
                .filter(|p| inner.contains(&p.location))
                .map(|p| p.grain.clone())
                .collect();
            let edges = graph_from_bodies(&kept, DEFAULT_TOL).unwrap().edge_count();
            assert!(edges >= last, "seed {seed} cap {cap}");
            last = edges;
        }
    }
}

fn check_distances(g: &IntersectionGraph, rng: &mut ChaCha8Rng) -> Result<(), TestCaseError> {
    let n = g.len();
    let fw = floyd_warshall(n, &g.edges());
    let all: Vec<Vec<Option<usize>>> = (0..n).map(|s| bfs_distances(g, s).unwrap()).collect();
    for a in 0..n {
        for b in 0..n {
            prop_assert_eq!(all[a][b], fw[a][b].map(|x| x as usize));
        }
    }
    let labels = components(g);
    for a in 0..n {
        for b in 0..n {
            prop_assert_eq!(labels.labels[a] == labels.labels[b], all[a][b].is_some());
        }
    }
    for _ in 0..1000 {
        let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
        if let (Some(ab), Some(bc)) = (all[a][b], all[b][c]) {
            prop_assert!(all[a][c].unwrap() <= ab + bc);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn graph_matches_brute_force(seed in any::<u64>(), d in 2usize..=3, n in 1usize..=300) {
        let c = random_config(seed, d, n);
        let g = build_graph(&c, &build_index(&c)).unwrap();
        prop_assert!(g.is_well_formed());
        let bodies: Vec<ConvexBody> = c.points.iter().map(|p| p.grain.clone()).collect();
        prop_assert_eq!(g.edges(), brute_force_edges(&bodies, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn distances_match_floyd_warshall(seed in any::<u64>(), d in 2usize..=3, n in 1usize..=200) {
        let c = random_config(seed, d, n);
        let g = build_graph(&c, &build_index(&c)).unwrap();
        check_distances(&g, &mut ChaCha8Rng::seed_from_u64(seed ^ 1))?;
    }

    #[test]
    fn sampled_graphs_are_well_formed(seed in any::<u64>()) {
        let w = Window::cube(Vector::zeros(2), 12.0).unwrap();
        let c = sample_configuration(&w, 1.0, &ellipses(), &TruncationPolicy::clamp(6.0), &[w.center()], SeededRng::new(seed, 0)).unwrap();
        let g = build_graph(&c, &build_index(&c)).unwrap();
        prop_assert!(g.is_well_formed());
        check_distances(&g, &mut ChaCha8Rng::seed_from_u64(seed))?;
    }
}
