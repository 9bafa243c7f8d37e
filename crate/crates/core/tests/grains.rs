use std::f64::consts::TAU;

use convex_boolean::geometry::{diameter_sequence, Rotation, Shape, Vector};
use convex_boolean::grains::{
    interior_anchor, sample_grain, sample_rotation, sample_tail, FamilyKind, GrainFamily,
    SeededRng, TailLaw,
};
use convex_boolean::oracles::{
    ks_critical_1pct, ks_statistic, ks_two_sample, ks_two_sample_critical_1pct,
};
use proptest::prelude::*;
use rand::Rng;

const INF: f64 = f64::INFINITY;

fn families() -> Vec<GrainFamily> {
    let p = |a| TailLaw::pareto(a, 1.0).unwrap();
    vec![
        GrainFamily::long_short(2, 1, p(1.5), 0.05).unwrap(),
        GrainFamily::long_short(4, 2, p(2.5), 0.05).unwrap(),
        GrainFamily::new(FamilyKind::EllipsoidIndependent { d: 3, laws: vec![p(1.2), p(1.3), p(1.4)] }, 0.05)
            .unwrap(),
        GrainFamily::new(FamilyKind::EllipsoidDependent { d: 3, betas: vec![0.2, 0.4, 0.7] }, 0.05)
            .unwrap(),
        GrainFamily::new(FamilyKind::RightTriangle { law: p(1.5), beta: 0.5 }, 0.05).unwrap(),
        GrainFamily::new(FamilyKind::Box { d: 3, k: 2, law: p(1.8), thin: 0.2 }, 0.05).unwrap(),
    ]
}

#[test]
fn tail_samples() {
    let mut g = SeededRng::new(0, 1).generator();
    assert_eq!(sample_tail(&TailLaw::degenerate(1.0).unwrap(), &mut g).unwrap(), 1.0);
    let law = TailLaw::pareto(1.5, 1.0).unwrap();
    assert!((law.upper_quantile(0.25) - 2.519842099789746).abs() < 1e-12);
    assert!(TailLaw::pareto(0.0, 1.0).is_err());
    assert!(TailLaw::pareto(-1.0, 1.0).is_err());
}

#[test]
fn pareto_tail_ratio() {
    let law = TailLaw::pareto(1.5, 1.0).unwrap();
    let mut g = SeededRng::new(7, 0).generator();
    let (mut above2, mut above4) = (0usize, 0usize);
    for _ in 0..1_000_000 {
        let x = sample_tail(&law, &mut g).unwrap();
        above2 += (x >= 2.0) as usize;
        above4 += (x >= 4.0) as usize;
    }
    let ratio = above4 as f64 / above2 as f64;
    assert!((ratio - 2f64.powf(-1.5)).abs() < 0.02, "{ratio}");
}

#[test]
fn rotations_are_haar() {
    let mut g = SeededRng::new(8, 0).generator();
    let n = 100_000;
    let mut angles = Vec::with_capacity(n);
    for _ in 0..n {
        let r = sample_rotation(2, &mut g).unwrap();
        let c = r.column(0);
        angles.push(c[1].atan2(c[0]).rem_euclid(TAU));
    }
    let ks = ks_statistic(&mut angles, |t| (t / TAU).clamp(0.0, 1.0));
    assert!(ks < ks_critical_1pct(n), "{ks}");

    let mut mean = Vector::zeros(3);
    for _ in 0..n {
        let r = sample_rotation(3, &mut g).unwrap();
        assert!(r.orthonormality_defect() < 1e-12);
        assert!((r.determinant() - 1.0).abs() < 1e-12);
        mean += r.column(0);
    }
    assert!((mean / n as f64).norm() < 0.02);
}

#[test]
fn tail_index_vectors() {
    let p = |a| TailLaw::pareto(a, 1.0).unwrap();
    let f = GrainFamily::long_short(2, 1, p(1.5), 0.05).unwrap();
    assert_eq!(f.tail_index_vector(), vec![1.5, INF]);
    let f = GrainFamily::new(
        FamilyKind::EllipsoidIndependent { d: 3, laws: vec![p(1.2), p(1.3), p(1.4)] },
        0.05,
    )
    .unwrap();
    let t = f.tail_index_vector();
    for (a, b) in t.iter().zip([1.2, 2.5, 3.9]) {
        assert!((a - b).abs() < 1e-12);
    }
    let f = GrainFamily::new(FamilyKind::EllipsoidDependent { d: 2, betas: vec![0.5, 1.0] }, 0.05)
        .unwrap();
    assert_eq!(f.tail_index_vector(), vec![1.0, 2.0]);
    let f = GrainFamily::new(FamilyKind::RightTriangle { law: p(1.5), beta: 0.5 }, 0.05).unwrap();
    assert_eq!(f.tail_index_vector(), vec![1.5, 3.0]);
}

#[test]
fn invalid_families_are_rejected() {
    let p = |a| TailLaw::pareto(a, 1.0).unwrap();
    assert!(GrainFamily::long_short(2, 2, p(1.5), 0.05).is_err());
    assert!(GrainFamily::long_short(2, 1, p(1.5), 0.0).is_err());
    assert!(GrainFamily::new(FamilyKind::RightTriangle { law: p(1.5), beta: 1.5 }, 0.05).is_err());
    assert!(GrainFamily::new(FamilyKind::Box { d: 2, k: 3, law: p(1.5), thin: 0.1 }, 0.05).is_err());
}

#[test]
fn long_short_grain_before_rotation() {
    let f = GrainFamily::long_short(2, 1, TailLaw::degenerate(5.0).unwrap(), 0.05).unwrap();
    let b = sample_grain(&f, &mut SeededRng::new(0, 0).generator()).unwrap();
    let Shape::Ellipsoid { semi_axes } = b.shape() else { panic!() };
    assert_eq!(semi_axes.as_slice(), &[2.5, 0.5]);
}

#[test]
fn triangle_hypotenuse_and_area() {
    let law = TailLaw::degenerate(4.0).unwrap();
    let f = GrainFamily::new(FamilyKind::RightTriangle { law, beta: 0.5 }, 0.05).unwrap();
    let mut g = SeededRng::new(1, 0).generator();
    for _ in 0..20 {
        let b = sample_grain(&f, &mut g).unwrap();
        assert!((b.first_diameter() - 4.0).abs() < 1e-12);
        assert!((b.volume().unwrap() - 2.0).abs() < 1e-12);
        // One vertex sits at the location.
        let vs = b.world_vertices().unwrap();
        assert!(vs.iter().any(|v| v.distance(&b.center()) < 1e-12));
    }
}

#[test]
fn independent_second_diameter_slope() {
    let p = |a| TailLaw::pareto(a, 1.0).unwrap();
    let f = GrainFamily::new(
        FamilyKind::EllipsoidIndependent { d: 2, laws: vec![p(1.2), p(1.3)] },
        0.05,
    )
    .unwrap();
    let mut g = SeededRng::new(9, 0).generator();
    let n = 1_000_000;
    let mut d2: Vec<f64> = (0..n)
        .map(|_| diameter_sequence(&f.sample_grain(&mut g).unwrap()).unwrap().lengths[1])
        .collect();
    d2.sort_by(f64::total_cmp);
    let ts: Vec<f64> = (0..12).map(|k| 2.0 * 10f64.powf(k as f64 / 11.0)).collect();
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .map(|&t| {
            let above = n - d2.partition_point(|&x| x < t);
            (t.ln(), (above as f64 / n as f64).ln())
        })
        .collect();
    let slope = regression_slope(&pts);
    assert!((slope + 2.5).abs() < 0.15, "{slope}");
}

fn regression_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn first_diameter_law_is_rotation_invariant() {
    let f = &families()[4];
    let fixed = Rotation::planar(0.7);
    let draw = |stream, rotate: bool| -> Vec<f64> {
        let mut g = SeededRng::new(10, stream).generator();
        (0..100_000)
            .map(|_| {
                let b = f.sample_grain(&mut g).unwrap();
                let b = if rotate { b.rotated(&fixed) } else { b };
                diameter_sequence(&b).unwrap().lengths[0]
            })
            .collect()
    };
    let (mut a, mut b) = (draw(1, false), draw(2, true));
    let ks = ks_two_sample(&mut a, &mut b);
    assert!(ks < ks_two_sample_critical_1pct(a.len(), b.len()), "{ks}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grains_contain_the_interior_ball(seed in any::<u64>(), which in 0usize..6) {
        let f = &families()[which];
        let mut g = SeededRng::new(seed, 3).generator();
        let b = f.sample_grain(&mut g).unwrap();
        let d = f.dim();
        let anchor = interior_anchor(&b);
        for _ in 0..100 {
            let mut x = Vector::zeros(d);
            for i in 0..d {
                x[i] = g.random_range(-1.0..1.0);
            }
            let x = x * (f.eps_interior / x.norm().max(1.0));
            prop_assert!(b.contains(&(anchor + x), 1e-9).unwrap());
        }
    }

    #[test]
    fn same_stream_same_grain(seed in any::<u64>(), stream in any::<u64>(), which in 0usize..6) {
        let f = &families()[which];
        let a = f.sample_grain(&mut SeededRng::new(seed, stream).generator()).unwrap();
        let b = f.sample_grain(&mut SeededRng::new(seed, stream).generator()).unwrap();
        prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
