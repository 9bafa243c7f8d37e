//! Slow reference implementations used to cross-check the fast paths.

use rand::Rng;

use crate::geometry::{ConvexBody, Rotation, Shape, Vector};
use crate::theory::{Regime, Robustness};

/// Signed separation of two boxes along the candidate axes of the separating axis
/// theorem (face normals, plus edge cross products in d = 3).
///
/// Positive iff the boxes are disjoint. Only d = 2 and d = 3 are supported.
pub fn sat_box_separation(a: &ConvexBody, b: &ConvexBody) -> f64 {
    let d = a.dim();
    assert!(d == 2 || d == 3, "box SAT is implemented for d = 2, 3");
    let (ha, hb) = match (a.shape(), b.shape()) {
        (Shape::OrientedBox { half_sides: x }, Shape::OrientedBox { half_sides: y }) => (*x, *y),
        _ => panic!("box SAT needs two boxes"),
    };
    let ca = a.rotation().columns();
    let cb = b.rotation().columns();
    let mut axes: Vec<Vector> = ca.iter().chain(cb.iter()).cloned().collect();
    if d == 3 {
        for u in &ca {
            for w in &cb {
                let c = Vector::from_slice(&[
                    u[1] * w[2] - u[2] * w[1],
                    u[2] * w[0] - u[0] * w[2],
                    u[0] * w[1] - u[1] * w[0],
                ]);
                if c.norm() > 1e-9 {
                    axes.push(c / c.norm());
                }
            }
        }
    }
    let delta = b.center() - a.center();
    axes.iter()
        .map(|u| {
            let ra: f64 = (0..d).map(|i| ha[i] * ca[i].dot(u).abs()).sum();
            let rb: f64 = (0..d).map(|i| hb[i] * cb[i].dot(u).abs()).sum();
            delta.dot(u).abs() - ra - rb
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn gap_along(a: &ConvexBody, b: &ConvexBody, u: &Vector) -> f64 {
    -b.support_value(&-*u) - a.support_value(u)
}

fn fibonacci_sphere(n: usize) -> Vec<Vector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * k as f64;
            Vector::from_slice(&[r * t.cos(), r * t.sin(), z])
        })
        .collect()
}

/// Signed distance between two convex bodies by maximizing the support-function gap
/// `min_B <u, y> - max_A <u, x>` over unit `u`: a dense direction scan followed by
/// local pattern search from the best few directions.
///
/// For disjoint bodies this is the Euclidean distance; for overlapping bodies it is
/// minus the penetration depth. Supports d = 2 and d = 3.
pub fn support_separation(a: &ConvexBody, b: &ConvexBody) -> f64 {
    let d = a.dim();
    match d {
        2 => {
            let n = 2048;
            let mut scored: Vec<(f64, f64)> = (0..n)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    (gap_along(a, b, &Vector::from_slice(&[t.cos(), t.sin()])), t)
                })
                .collect();
            scored.sort_by(|x, y| y.0.total_cmp(&x.0));
            let mut best = scored[0].0;
            for &(g0, t0) in scored.iter().take(8) {
                let (mut g, mut t) = (g0, t0);
                let mut step = 2.0 * std::f64::consts::PI / n as f64;
                while step > 1e-14 {
                    let mut moved = false;
                    for s in [step, -step] {
                        let tt = t + s;
                        let gg = gap_along(a, b, &Vector::from_slice(&[tt.cos(), tt.sin()]));
                        if gg > g {
                            g = gg;
                            t = tt;
                            moved = true;
                        }
                    }
                    if !moved {
                        step *= 0.5;
                    }
                }
                best = best.max(g);
            }
            best
        }
        3 => {
            let dirs = fibonacci_sphere(20000);
            let mut scored: Vec<(f64, Vector)> =
                dirs.into_iter().map(|u| (gap_along(a, b, &u), u)).collect();
            scored.sort_by(|x, y| y.0.total_cmp(&x.0));
            let mut best = scored[0].0;
            for (g0, u0) in scored.iter().take(8) {
                let (mut g, mut u) = (*g0, *u0);
                let mut step = 0.05;
                while step > 1e-13 {
                    let mut moved = false;
                    for axis in 0..3 {
                        for s in [step, -step] {
                            let mut cand = u;
                            cand[axis] += s;
                            let cand = cand / cand.norm();
                            let gg = gap_along(a, b, &cand);
                            if gg > g {
                                g = gg;
                                u = cand;
                                moved = true;
                            }
                        }
                    }
                    if !moved {
                        step *= 0.5;
                    }
                }
                best = best.max(g);
            }
            best
        }
        _ => panic!("support separation oracle is implemented for d = 2, 3"),
    }
}

/// Membership in the hull of `points` by enumerating `(d+1)`-subsets and solving for
/// barycentric coordinates.
pub fn hull_contains(points: &[Vector], x: &Vector, tol: f64) -> bool {
    let d = x.dim();
    let n = points.len();
    let k = d + 1;
    if n < k {
        return false;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if let Some(lambda) = barycentric(points, &idx, x) {
            if lambda.iter().all(|&l| l >= -tol) {
                return true;
            }
        }
        // Next combination in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return false;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn barycentric(points: &[Vector], idx: &[usize], x: &Vector) -> Option<Vec<f64>> {
    let d = x.dim();
    let base = points[idx[0]];
    // Columns are edge vectors from the base vertex.
    let mut a = vec![vec![0.0; d]; d];
    let mut rhs: Vec<f64> = (0..d).map(|r| x[r] - base[r]).collect();
    for (c, &i) in idx[1..].iter().enumerate() {
        let e = points[i] - base;
        for r in 0..d {
            a[r][c] = e[r];
        }
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..d {
        let piv = (col..d).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(piv, col);
        rhs.swap(piv, col);
        for r in col + 1..d {
            let f = a[r][col] / a[col][col];
            for c in col..d {
                a[r][c] -= f * a[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut mu = vec![0.0; d];
    for r in (0..d).rev() {
        let mut s = rhs[r];
        for c in r + 1..d {
            s -= a[r][c] * mu[c];
        }
        mu[r] = s / a[r][r];
    }
    let mut out = Vec::with_capacity(d + 1);
    out.push(1.0 - mu.iter().sum::<f64>());
    out.extend(mu);
    Some(out)
}

/// `sum_i |x_i| / (l_i / 2) <= 1 + tol`, the axis-aligned cross-polytope with
/// diameters `l`.
pub fn cross_polytope_contains(lengths: &[f64], x: &Vector, tol: f64) -> bool {
    let s: f64 = lengths
        .iter()
        .enumerate()
        .map(|(i, l)| x[i].abs() / (l / 2.0))
        .sum();
    s <= 1.0 + tol
}

/// Diameter sequence by brute force: all pairs for the first diameter, then all pairs
/// of the points expressed in an explicit basis of the orthogonal complement.
pub fn brute_force_diameters(points: &[Vector]) -> Vec<f64> {
    let d = points[0].dim();
    // Coordinates with respect to the remaining basis, starting from the identity.
    let mut coords: Vec<Vec<f64>> = points.iter().map(|p| p.as_slice().to_vec()).collect();
    let mut out = Vec::with_capacity(d);
    for _ in 0..d {
        let m = coords[0].len();
        let mut best = -1.0;
        let mut dir = vec![0.0; m];
        for i in 0..coords.len() {
            for j in i + 1..coords.len() {
                let diff: Vec<f64> = (0..m).map(|r| coords[j][r] - coords[i][r]).collect();
                let dist: f64 = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
                if dist > best {
                    best = dist;
                    dir = diff.iter().map(|x| x / dist).collect();
                }
            }
        }
        out.push(best);
        if m == 1 {
            break;
        }
        // Orthonormal basis of dir's complement via Gram-Schmidt on the identity.
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for i in 0..m {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            let p: f64 = e.iter().zip(&dir).map(|(x, y)| x * y).sum();
            e.iter_mut().zip(&dir).for_each(|(x, y)| *x -= p * y);
            for b in &basis {
                let p: f64 = e.iter().zip(b).map(|(x, y)| x * y).sum();
                e.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
            }
            let n = e.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-6 && basis.len() < m - 1 {
                basis.push(e.into_iter().map(|x| x / n).collect());
            }
        }
        coords = coords
            .iter()
            .map(|c| {
                basis
                    .iter()
                    .map(|b| b.iter().zip(c).map(|(x, y)| x * y).sum())
                    .collect()
            })
            .collect();
    }
    out
}

/// Edge list `(i, j), i < j` of the intersection graph by testing every pair.
pub fn brute_force_edges(
    bodies: &[ConvexBody],
    tol: f64,
) -> crate::Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for i in 0..bodies.len() {
        for j in i + 1..bodies.len() {
            if crate::geometry::gjk::intersects(&bodies[i], &bodies[j], tol)? {
                edges.push((i, j));
            }
        }
    }
    Ok(edges)
}

/// All-pairs hop distances; `None` when unreachable.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<u32>>> {
    const INF: u32 = u32::MAX / 2;
    let mut dist = vec![vec![INF; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in edges {
        dist[a][b] = 1;
        dist[b][a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i][k];
            if dik == INF {
                continue;
            }
            for j in 0..n {
                let cand = dik + dist[k][j];
                if cand < dist[i][j] {
                    dist[i][j] = cand;
                }
            }
        }
    }
    dist.into_iter()
        .map(|row| row.into_iter().map(|x| (x < INF).then_some(x)).collect())
        .collect()
}

/// One-sample Kolmogorov-Smirnov statistic against `cdf`.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / n - j as f64 / m).abs());
    }
    best
}

/// Asymptotic 1% critical value of the one-sample statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Asymptotic 1% critical value of the two-sample statistic.
pub fn ks_two_sample_critical_1pct(n: usize, m: usize) -> f64 {
    1.6276 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// A random rotation from composed Givens rotations (independent of the Haar sampler).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Rotation {
    let mut r = Rotation::identity(d);
    for _ in 0..3 {
        for i in 0..d {
            for j in i + 1..d {
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                r = Rotation::givens(d, i, j, t).compose(&r);
            }
        }
    }
    r
}

fn random_sizes<R: Rng + ?Sized>(rng: &mut R, d: usize, lo: f64, hi: f64) -> Vector {
    let mut v = Vector::zeros(d);
    for i in 0..d {
        v[i] = lo * (hi / lo).powf(rng.random::<f64>());
    }
    v
}

/// A random body of any kind: sizes log-uniform in `[0.05, 3]`, center uniform in
/// `[-spread, spread]^d`.
pub fn random_body<R: Rng + ?Sized>(rng: &mut R, d: usize, spread: f64) -> ConvexBody {
    let mut center = Vector::zeros(d);
    for i in 0..d {
        center[i] = rng.random_range(-spread..spread);
    }
    let rot = random_rotation(rng, d);
    loop {
        let kind = rng.random_range(0..4);
        let body = match kind {
            0 => ConvexBody::oriented_box(random_sizes(rng, d, 0.05, 3.0), center, rot),
            1 => ConvexBody::ellipsoid(random_sizes(rng, d, 0.05, 3.0), center, rot),
            2 => ConvexBody::cross_polytope(random_sizes(rng, d, 0.05, 3.0), center, rot),
            _ => {
                let n = rng.random_range(d + 1..=d + 8);
                let verts = (0..n)
                    .map(|_| {
                        let mut v = Vector::zeros(d);
                        for i in 0..d {
                            v[i] = rng.random_range(-2.0..2.0);
                        }
                        v
                    })
                    .collect();
                ConvexBody::polytope(verts, center, rot)
            }
        };
        if let Ok(b) = body {
            return b;
        }
    }
}

/// A random oriented box with sizes log-uniform in `[0.05, 3]`.
pub fn random_box<R: Rng + ?Sized>(rng: &mut R, d: usize, spread: f64) -> ConvexBody {
    let mut center = Vector::zeros(d);
    for i in 0..d {
        center[i] = rng.random_range(-spread..spread);
    }
    let rot = random_rotation(rng, d);
    ConvexBody::oriented_box(random_sizes(rng, d, 0.05, 3.0), center, rot)
        .expect("positive sizes")
}

/// Sorted tail indices mixing exact interval endpoints, half-integers, generic values
/// and infinity.
pub fn random_exponents<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    let mut a: Vec<f64> = (0..d)
        .map(|_| match rng.random_range(0..4) {
            0 => rng.random_range(1..=2 * d) as f64,
            1 => rng.random_range(1..=4 * d) as f64 / 2.0,
            2 => rng.random_range(0.05..2.0 * d as f64),
            _ => {
                if rng.random_bool(0.5) {
                    f64::INFINITY
                } else {
                    rng.random_range(0.05..1.0)
                }
            }
        })
        .collect();
    a.sort_by(f64::total_cmp);
    a
}

/// Verdicts of the exponent calculator, recomputed index by index.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentScan {
    pub m: Vec<usize>,
    pub kappa: Option<(usize, f64)>,
    pub regime: Regime,
    pub robust: Robustness,
}

/// Straight transcription of the definitions, one index at a time; `a` is
/// indexed from 0 here.
pub fn exponent_scan(d: usize, a: &[f64], vol_l2: bool, d1_ld: bool) -> ExponentScan {
    let mut m = Vec::new();
    for k in 1..d {
        let lo = k as f64;
        let hi = if 2 * k < d { 2 * k } else { d } as f64;
        if lo < a[k - 1] && a[k - 1] < hi {
            m.push(k);
        }
    }
    let mut best_k = 0;
    let mut best = f64::NEG_INFINITY;
    for &s in &m {
        let width = if s < d - s { s } else { d - s } as f64;
        let r = width / (a[s - 1] - s as f64);
        if r > best {
            best = r;
            best_k = s;
        }
    }
    let kappa = (best_k > 0).then(|| (best_k, 2.0 / best.ln()));
    let mut fast = false;
    let mut robust = false;
    let mut all_above_2k = true;
    for k in 1..=d {
        let x = a[k - 1];
        fast |= x <= k as f64;
        robust |= x < (2 * k).min(d) as f64;
        all_above_2k &= x > (2 * k) as f64;
    }
    let regime = if fast {
        Regime::FasterThanLoglog
    } else if !m.is_empty() {
        Regime::Ultrasmall
    } else {
        Regime::SlowerThanLoglog
    };
    let robust = if robust {
        Robustness::Robust
    } else if (all_above_2k && vol_l2) || d1_ld {
        Robustness::PossiblyNonRobust
    } else {
        Robustness::Undetermined
    };
    ExponentScan { m, kappa, regime, robust }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square() {
        let sq = [
            Vector::from_slice(&[0.0, 0.0]),
            Vector::from_slice(&[1.0, 0.0]),
            Vector::from_slice(&[1.0, 1.0]),
            Vector::from_slice(&[0.0, 1.0]),
        ];
        assert!(hull_contains(&sq, &Vector::from_slice(&[0.9, 0.9]), 1e-12));
        assert!(!hull_contains(&sq, &Vector::from_slice(&[1.1, 0.5]), 1e-12));
    }

    #[test]
    fn separation_of_balls() {
        let a = ConvexBody::ball(Vector::zeros(3), 1.0).unwrap();
        let b = ConvexBody::ball(Vector::from_slice(&[3.0, 0.0, 0.0]), 1.0).unwrap();
        assert!((support_separation(&a, &b) - 1.0).abs() < 1e-9);
        let c = ConvexBody::ball(Vector::from_slice(&[1.5, 0.0, 0.0]), 1.0).unwrap();
        assert!((support_separation(&a, &c) + 0.5).abs() < 1e-9);
    }

    #[test]
    fn floyd_warshall_chain() {
        let d = floyd_warshall(4, &[(0, 1), (1, 2)]);
        assert_eq!(d[0][2], Some(2));
        assert_eq!(d[0][3], None);
    }

    #[test]
    fn brute_diameters_square() {
        let sq = [
            Vector::from_slice(&[0.0, 0.0]),
            Vector::from_slice(&[1.0, 0.0]),
            Vector::from_slice(&[1.0, 1.0]),
            Vector::from_slice(&[0.0, 1.0]),
        ];
        let ds = brute_force_diameters(&sq);
        assert!((ds[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!((ds[1] - 2f64.sqrt()).abs() < 1e-15);
    }
}
