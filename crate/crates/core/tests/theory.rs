use std::f64::consts::PI;

use convex_boolean::geometry::{ConvexBody, Rotation, Vector};
use convex_boolean::grains::{FamilyKind, GrainFamily, TailLaw};
use convex_boolean::oracles::{exponent_scan, random_body, random_exponents, random_rotation};
use convex_boolean::process::{configuration_from_bodies, MarkedPoint, Window};
use convex_boolean::theory::{
    b_star, check_path_event, classify_regime, in_o_i, kappa_and_prefactor, planted_configuration,
    revalidate, robust_set_m, threshold_sequence, ModelExponents, PathVariant, Regime,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INF: f64 = f64::INFINITY;

#[test]
fn calculator_matches_the_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..10_000 {
        let d = 2 + i % 5;
        let a = random_exponents(&mut rng, d);
        let (l1, l2, dl) = (rng.random_bool(0.5), rng.random_bool(0.5), rng.random_bool(0.3));
        let exp = ModelExponents::new(d, a.clone()).unwrap();
        let want = exponent_scan(d, &a, l1 && l2, dl);
        assert_eq!(robust_set_m(&exp), want.m, "{a:?}");
        assert_eq!(kappa_and_prefactor(&exp), want.kappa, "{a:?}");
        if let Some((_, p)) = want.kappa {
            assert!(p > 0.0);
        }
        let r = classify_regime(&exp, l1, l1 && l2, dl).unwrap();
        assert_eq!((r.regime, r.robust, r.dense), (want.regime, want.robust, !l1), "{a:?}");
        // Slower regime coincides with every index at or above its upper end.
        if r.regime == Regime::SlowerThanLoglog {
            assert!((1..=d).all(|k| a[k - 1] >= (2 * k).min(d) as f64 || k == d));
        }
    }
}

#[test]
fn worked_family_prefactors() {
    let p = |a| TailLaw::pareto(a, 1.0).unwrap();
    let of = |f: &GrainFamily| {
        let e = ModelExponents::new(f.dim(), f.tail_index_vector()).unwrap();
        kappa_and_prefactor(&e).unwrap()
    };
    for alpha in [1.1f64, 1.25, 1.5, 1.75, 1.9] {
        let want = 2.0 / (1.0 / (alpha - 1.0)).ln();
        let (k, got) = of(&GrainFamily::long_short(2, 1, p(alpha), 0.05).unwrap());
        assert_eq!(k, 1);
        assert!((got - want).abs() < 1e-12);
        for beta in [0.3, 0.6, 0.9] {
            let tri =
                GrainFamily::new(FamilyKind::RightTriangle { law: p(alpha), beta }, 0.05).unwrap();
            let (k, got) = of(&tri);
            assert_eq!(k, 1);
            assert!((got - want).abs() < 1e-12);
        }
    }
    for (d, betas) in [
        (2, vec![0.55, 0.8]),
        (3, vec![0.2, 0.4, 0.7]),
        (4, vec![0.2, 0.3, 0.45, 0.9]),
        (4, vec![0.1, 0.15, 0.3, 0.35]),
    ] {
        let f = GrainFamily::new(FamilyKind::EllipsoidDependent { d, betas: betas.clone() }, 0.05)
            .unwrap();
        let (k, got) = of(&f);
        let width = k.min(d - k) as f64;
        let want = 2.0 / (width / (1.0 / betas[d - k] - k as f64)).ln();
        assert!((got - want).abs() < 1e-12, "{betas:?}");
    }
}

#[test]
fn threshold_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 500 {
        let d = rng.random_range(2..=6);
        let exp = ModelExponents::new(d, random_exponents(&mut rng, d)).unwrap();
        let eps = rng.random_range(0.01..0.24);
        let f0 = rng.random_range(1.5..50.0);
        let Ok(t) = threshold_sequence(f0, &exp, eps, 4) else { continue };
        let (k, _) = kappa_and_prefactor(&exp).unwrap();
        assert!((t.exponent() - (exp.ratio(k) - eps)).abs() < 1e-12);
        assert!(t.f.windows(2).all(|w| w[1] > w[0]));
        for (n, f) in t.f.iter().enumerate() {
            let want = f0.ln().ln() + n as f64 * t.exponent().ln();
            let got = f.ln().ln();
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1e-300), "{got} {want}");
        }
        checked += 1;
    }
}

#[test]
fn threshold_errors() {
    let exp = ModelExponents::new(2, vec![1.5, INF]).unwrap();
    assert!(threshold_sequence(1.0, &exp, 0.1, 2).is_err());
    assert!(threshold_sequence(10.0, &exp, 0.25, 2).is_err());
    let empty = ModelExponents::new(2, vec![5.0, 6.0]).unwrap();
    assert!(threshold_sequence(10.0, &empty, 0.1, 2).is_err());
    let t = threshold_sequence(10.0, &exp, 0.1, 1).unwrap();
    let s = planted_configuration(0, 1, false).unwrap();
    assert!(check_path_event(&s.config, &s.index, 0, 2, &t, PathVariant::A, Some(PI / 4.0)).is_err());
}

fn marked(body: ConvexBody) -> MarkedPoint {
    let w = Window::cube(body.center(), 1e6).unwrap();
    configuration_from_bodies(&w, vec![body], &[true]).unwrap().points.remove(0)
}

#[test]
fn sector_examples() {
    let e = ConvexBody::ellipsoid(
        Vector::from_slice(&[5.0, 2.0, 1.0]),
        Vector::zeros(3),
        Rotation::identity(3),
    )
    .unwrap();
    let a = marked(e);
    let far = Vector::from_slice(&[0.0, 20.0, 0.0]);
    assert!(!in_o_i(&a, &far, 10.0, 1, PI / 4.0).unwrap());
    let along = Vector::from_slice(&[7.5, 0.0, 0.0]);
    assert!(!in_o_i(&a, &along, 10.0, 1, PI / 4.0).unwrap());
    let side = Vector::from_slice(&[0.0, 0.0, 7.5]);
    assert!(in_o_i(&a, &side, 10.0, 1, PI / 4.0).unwrap());
    // The default angle at kappa = 1 is pi/2, which no direction clears.
    assert!(!in_o_i(&a, &side, 10.0, 1, PI / 2.0).unwrap());
}

#[test]
fn clipped_shadow_samples_stay_in_the_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let d = rng.random_range(2..=3);
        let body = random_body(&mut rng, d, 3.0).scaled(rng.random_range(0.5..5.0));
        let a = marked(body);
        let mut toward = Vector::zeros(d);
        for i in 0..d {
            toward[i] = rng.random_range(-20.0..20.0);
        }
        let f_prev = rng.random_range(0.5..6.0);
        let r = b_star(&a, &toward, f_prev, 256).unwrap();
        assert!(r.plane_defect() < 1e-9);
        assert!((r.base - a.location).norm() - f_prev < 1e-9);
        // The base is the foot of the location, and projection does not expand.
        for s in &r.samples {
            assert!((*s - r.base).norm() <= f_prev + 1e-9);
        }
    }
}

#[test]
fn planted_and_adversarial_scenarios() {
    for seed in 0..20 {
        for n in [1, 2] {
            let s = planted_configuration(seed, n, false).unwrap();
            let w = check_path_event(&s.config, &s.index, s.start, n, &s.thresholds, s.variant, Some(s.phi))
                .unwrap()
                .expect("planted witness");
            assert_eq!(w.ids, s.planted);
            assert!(w.steps.iter().all(|r| r.passed()));
            assert!(revalidate(&s.config, &w, &s.thresholds, s.variant, Some(s.phi)).unwrap());
            let bad = planted_configuration(seed, n, true).unwrap();
            let none = check_path_event(&bad.config, &bad.index, bad.start, n, &bad.thresholds, bad.variant, Some(bad.phi))
                .unwrap();
            assert!(none.is_none());
        }
    }
}

#[test]
fn tampered_witness_fails_revalidation() {
    let s = planted_configuration(4, 2, false).unwrap();
    let mut w = check_path_event(&s.config, &s.index, s.start, 2, &s.thresholds, s.variant, Some(s.phi))
        .unwrap()
        .unwrap();
    w.ids.swap(0, 1);
    assert!(!revalidate(&s.config, &w, &s.thresholds, s.variant, Some(s.phi)).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sectors_are_rotation_invariant(seed in any::<u64>(), d in 2usize..=4, kappa in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let body = random_body(&mut rng, d, 5.0);
        let kappa = kappa.min(d - 1);
        let phi = rng.random_range(0.05..PI / 2.0);
        let f = rng.random_range(1.0..10.0);
        let x = body.center();
        let mut offset = Vector::zeros(d);
        for i in 0..d {
            offset[i] = rng.random_range(-f..f);
        }
        let cand = x + offset;
        let r = random_rotation(&mut rng, d);
        let a = marked(body.clone());
        // Rotate the recorded orientations rather than recomputing them: tied diameter
        // pairs (box diagonals) may otherwise resolve to a different pair.
        let mut b = marked(body.rotated(&r));
        b.diameters.orientations = a.diameters.orientations.iter().map(|p| r.apply(p)).collect();
        let cand_r = x + r.apply(&offset);
        // Skip candidates within rounding of a boundary.
        let dist = offset.norm();
        let near_radius = (dist - f / 2.0).abs() < 1e-9 || (dist - f).abs() < 1e-9;
        let near_angle = (1..=kappa).any(|j| {
            let p = a.diameters.orientation(j);
            let t = offset.angle_to(&p);
            (t - phi).abs() < 1e-9 || (PI - t - phi).abs() < 1e-9
        });
        prop_assume!(!near_radius && !near_angle && dist > 0.0);
        prop_assert_eq!(
            in_o_i(&a, &cand, f, kappa, phi).unwrap(),
            in_o_i(&b, &cand_r, f, kappa, phi).unwrap()
        );
    }
}
