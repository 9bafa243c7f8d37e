use convex_boolean::geometry::Vector;
use convex_boolean::graph::{build_graph, chemical_distance, palm_pair, reaches_boundary};
use convex_boolean::grains::{GrainFamily, SeededRng, TailLaw};
use convex_boolean::process::{
    build_index, lazy_chemical_distance, lazy_reaches_boundary, sample_configuration,
    LazyProcess, SearchOutcome, TruncationPolicy, Window,
};

fn ellipses() -> GrainFamily {
    GrainFamily::long_short(2, 1, TailLaw::pareto(1.5, 1.0).unwrap(), 0.01).unwrap()
}

#[test]
fn lazy_distances_match_the_materialized_window() {
    let family = ellipses();
    let trunc = TruncationPolicy::clamp(30.0);
    let window = Window::cube(Vector::zeros(2), 60.0).unwrap();
    let region = window.inflate(trunc.margin(&family));
    let mut connected = 0;
    for seed in 0..12u64 {
        let rng = SeededRng::new(seed, 5);
        let palms = palm_pair(&Vector::zeros(2), 20.0);
        let config = sample_configuration(&window, 0.6, &family, &trunc, &palms, rng).unwrap();
        let graph = build_graph(&config, &build_index(&config)).unwrap();
        let ids = config.palm_ids();
        let want = chemical_distance(&graph, ids[0], ids[1]).unwrap();

        let mut lazy =
            LazyProcess::new(&family, trunc, vec![0.6], rng, Some(region), 1e-9).unwrap();
        let a = lazy.add_palm(palms[0]).unwrap();
        let b = lazy.add_palm(palms[1]).unwrap();
        let got = lazy_chemical_distance(&mut lazy, a, b, 0, usize::MAX).unwrap();
        match want {
            Some(d) => {
                connected += 1;
                assert_eq!(got, SearchOutcome::Connected(d), "seed {seed}");
            }
            None => assert_eq!(got, SearchOutcome::Disconnected, "seed {seed}"),
        }
        assert!(lazy.realized() <= config.len());

        let mut lazy =
            LazyProcess::new(&family, trunc, vec![0.6], rng, Some(region), 1e-9).unwrap();
        let a = lazy.add_palm(palms[0]).unwrap();
        let hit = lazy_reaches_boundary(&mut lazy, a, &window, 0, usize::MAX).unwrap();
        assert_eq!(hit, Some(reaches_boundary(&config, &graph, ids[0]).unwrap()));
    }
    assert!(connected > 0);
}

#[test]
fn budget_exhaustion_is_reported() {
    let family = ellipses();
    let trunc = TruncationPolicy::clamp(100.0);
    let mut lazy =
        LazyProcess::new(&family, trunc, vec![1.0], SeededRng::new(1, 1), None, 1e-9).unwrap();
    let a = lazy.add_palm(Vector::zeros(2)).unwrap();
    let b = lazy.add_palm(Vector::from_slice(&[500.0, 0.0])).unwrap();
    let out = lazy_chemical_distance(&mut lazy, a, b, 0, 1).unwrap();
    assert_eq!(out, SearchOutcome::Unresolved);
}

#[test]
fn lazy_engine_requires_a_cap() {
    let family = ellipses();
    assert!(LazyProcess::new(
        &family,
        TruncationPolicy::none(),
        vec![1.0],
        SeededRng::new(0, 0),
        None,
        1e-9
    )
    .is_err());
}
