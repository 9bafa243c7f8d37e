//! Support-map distance queries in general dimension (Gilbert-Johnson-Keerthi).

use super::linalg;
use super::vector::{Vector, MAX_DIM};
use crate::error::{Error, Result};

/// A convex set described by its support mapping.
pub trait SupportMap {
    fn dim(&self) -> usize;
    /// Some point of the set maximizing `<p, direction>`. `direction` need not be unit.
    fn support(&self, direction: &Vector) -> Vector;
    /// Any point of the set; used to seed the iteration.
    fn interior_point(&self) -> Vector;
}

/// A single point, for containment queries.
#[derive(Clone, Copy, Debug)]
pub struct PointShape(pub Vector);

impl SupportMap for PointShape {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn support(&self, _direction: &Vector) -> Vector {
        self.0
    }
    fn interior_point(&self) -> Vector {
        self.0
    }
}

/// Convex hull of a finite point set.
#[derive(Clone, Debug)]
pub struct PointCloud<'a>(pub &'a [Vector]);

impl SupportMap for PointCloud<'_> {
    fn dim(&self) -> usize {
        self.0[0].dim()
    }
    fn support(&self, direction: &Vector) -> Vector {
        let mut best = self.0[0];
        let mut best_val = best.dot(direction);
        for p in &self.0[1..] {
            let val = p.dot(direction);
            if val > best_val {
                best_val = val;
                best = *p;
            }
        }
        best
    }
    fn interior_point(&self) -> Vector {
        let n = self.0.len() as f64;
        self.0.iter().fold(Vector::zeros(self.dim()), |a, p| a + *p) / n
    }
}

/// Bracket on the Euclidean distance between two convex sets.
#[derive(Clone, Copy, Debug)]
pub struct DistanceBounds {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    /// Closest point of `a - b` to the origin found so far.
    pub separation: Vector,
}

pub const DEFAULT_MAX_ITERATIONS: usize = 512;

// Largest simplex: d + 1 vertices.
const MAX_VERTS: usize = MAX_DIM + 1;

#[derive(Clone, Copy)]
struct Simplex {
    pts: [Vector; MAX_VERTS],
    len: usize,
}

/// Closest point to the origin of the hull of the simplex, which must contain the
/// most recently added vertex (the last one). Shrinks the simplex to the support
/// face of the closest point.
fn reduce(s: &mut Simplex, scale: f64) -> Vector {
    let n = s.len;
    let last = n - 1;
    let mut best: Option<(f64, Vector, usize)> = None;
    // Subsets are encoded as bitmasks over the first n-1 vertices; the last vertex
    // is always included.
    for mask in 0..(1usize << last) {
        let mut idx = [0usize; MAX_VERTS];
        let mut m = 0;
        for (i, slot) in (0..last).filter(|i| mask & (1 << i) != 0).zip(0..) {
            idx[slot] = i;
            m += 1;
        }
        idx[m] = last;
        let k = m + 1;
        let base = s.pts[last];
        let point;
        if k == 1 {
            point = base;
        } else {
            let mut g = [[0.0; MAX_VERTS]; MAX_VERTS];
            let mut rhs = [0.0; MAX_VERTS];
            let edges: Vec<Vector> = idx[..m].iter().map(|&i| s.pts[i] - base).collect();
            let len: Vec<f64> = edges.iter().map(|e| e.norm()).collect();
            if len.iter().any(|&l| l <= 1e-15 * scale) {
                continue;
            }
            // Unit-diagonal Gram system, so edges of very different lengths do not
            // look singular.
            for i in 0..m {
                for j in 0..m {
                    g[i][j] = edges[i].dot(&edges[j]) / (len[i] * len[j]);
                }
                rhs[i] = -edges[i].dot(&base) / len[i];
            }
            if linalg::solve(&mut g, &mut rhs, m, 1.0).is_none() {
                continue;
            }
            for i in 0..m {
                rhs[i] /= len[i];
            }
            let mu_sum: f64 = rhs[..m].iter().sum();
            if rhs[..m].iter().any(|&mu| mu <= 0.0) || mu_sum >= 1.0 {
                continue;
            }
            let mut p = base;
            for i in 0..m {
                p += edges[i] * rhs[i];
            }
            point = p;
        }
        let norm2 = point.norm_squared();
        if best.map_or(true, |(b, _, _)| norm2 < b) {
            best = Some((norm2, point, mask));
        }
    }
    let (_, point, mask) = best.expect("singleton subset is always admissible");
    let mut kept = [s.pts[0]; MAX_VERTS];
    let mut k = 0;
    for i in 0..last {
        if mask & (1 << i) != 0 {
            kept[k] = s.pts[i];
            k += 1;
        }
    }
    kept[k] = s.pts[last];
    s.pts = kept;
    s.len = k + 1;
    point
}

/// Runs the distance iteration until the bracket decides `distance <= tol` or the
/// gap closes to `rel_gap` of the current estimate.
fn iterate<A: SupportMap + ?Sized, B: SupportMap + ?Sized>(
    a: &A,
    b: &B,
    tol: Option<f64>,
    rel_gap: f64,
    max_iterations: usize,
) -> Result<(DistanceBounds, Option<bool>)> {
    let d = a.dim();
    if b.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: b.dim(),
        });
    }
    let mut v = a.interior_point() - b.interior_point();
    let scale = {
        let probe = v.norm().max(1.0);
        let e = Vector::basis(d, 0);
        let wa = a.support(&e) - a.support(&-e);
        let wb = b.support(&e) - b.support(&-e);
        probe.max(wa.norm()).max(wb.norm())
    };
    if v.norm_squared() == 0.0 {
        v = Vector::basis(d, 0);
    }
    let w0 = a.support(&-v) - b.support(&v);
    let mut simplex = Simplex {
        pts: [w0; MAX_VERTS],
        len: 1,
    };
    v = w0;
    let mut lower: f64 = 0.0;
    for it in 1..=max_iterations {
        let vnorm = v.norm();
        let bounds = DistanceBounds {
            lower,
            upper: vnorm,
            iterations: it,
            separation: v,
        };
        if let Some(t) = tol {
            if vnorm <= t {
                return Ok((bounds, Some(true)));
            }
        }
        if vnorm == 0.0 || simplex.len == d + 1 {
            // Full-dimensional simplex with the origin inside.
            let b0 = DistanceBounds {
                lower: 0.0,
                upper: 0.0,
                ..bounds
            };
            return Ok((b0, tol.map(|t| t >= 0.0)));
        }
        let w = a.support(&-v) - b.support(&v);
        // Every point of a - b satisfies <p, -v> <= <w, -v>.
        lower = lower.max(v.dot(&w) / vnorm);
        let bounds = DistanceBounds { lower, ..bounds };
        if let Some(t) = tol {
            if lower > t {
                return Ok((bounds, Some(false)));
            }
        }
        let gap = vnorm - lower;
        let duplicate = simplex.pts[..simplex.len]
            .iter()
            .any(|p| (*p - w).norm_squared() <= (1e-14 * scale).powi(2));
        if gap <= rel_gap * vnorm.max(1e-300) || duplicate {
            // The bracket has closed to working precision.
            // Here lower <= tol < upper, so the distance is tol up to rounding.
            let verdict = tol.map(|_| true);
            if tol.is_some() && gap > 1e-9 * scale {
                return Err(Error::NotConverged {
                    iterations: it,
                    lower,
                    upper: vnorm,
                });
            }
            return Ok((bounds, verdict));
        }
        simplex.pts[simplex.len] = w;
        simplex.len += 1;
        let next = reduce(&mut simplex, scale);
        if next.norm_squared() >= v.norm_squared() {
            // No progress: numerical floor reached.
            if let Some(t) = tol {
                if vnorm - lower <= 1e-9 * scale {
                    return Ok((bounds, Some(lower <= t)));
                }
                return Err(Error::NotConverged {
                    iterations: it,
                    lower,
                    upper: vnorm,
                });
            }
            return Ok((bounds, None));
        }
        v = next;
    }
    Err(Error::NotConverged {
        iterations: max_iterations,
        lower,
        upper: v.norm(),
    })
}

/// True iff the distance between `a` and `b` is at most `tol`.
///
/// Fails with [`Error::NotConverged`] when the budget runs out before the bracket
/// separates from `tol`.
pub fn intersects<A: SupportMap + ?Sized, B: SupportMap + ?Sized>(
    a: &A,
    b: &B,
    tol: f64,
) -> Result<bool> {
    intersects_with_budget(a, b, tol, DEFAULT_MAX_ITERATIONS)
}

pub fn intersects_with_budget<A: SupportMap + ?Sized, B: SupportMap + ?Sized>(
    a: &A,
    b: &B,
    tol: f64,
    max_iterations: usize,
) -> Result<bool> {
    if !tol.is_finite() {
        return Err(Error::invalid("tolerance must be finite"));
    }
    let (_, verdict) = iterate(a, b, Some(tol), 1e-12, max_iterations)?;
    Ok(verdict.expect("verdict is set when a tolerance is given"))
}

/// Distance bracket refined until the relative gap is below `rel_gap`.
pub fn distance<A: SupportMap + ?Sized, B: SupportMap + ?Sized>(
    a: &A,
    b: &B,
    rel_gap: f64,
) -> Result<DistanceBounds> {
    Ok(iterate(a, b, None, rel_gap, DEFAULT_MAX_ITERATIONS)?.0)
}
