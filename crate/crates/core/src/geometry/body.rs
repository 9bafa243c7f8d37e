use serde::{Deserialize, Serialize};

use super::gjk::{self, SupportMap};
use super::linalg;
use super::vector::{Rotation, Vector, MAX_DIM};
use crate::error::{Error, Result};

/// Shape of a grain in its local frame (centered at the local origin).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    OrientedBox { half_sides: Vector },
    Ellipsoid { semi_axes: Vector },
    CrossPolytope { half_diameters: Vector },
    /// Convex hull of the listed vertices, given in the local frame.
    VertexPolytope { vertices: Vec<Vector> },
}

impl Shape {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Shape::OrientedBox { .. } => "oriented_box",
            Shape::Ellipsoid { .. } => "ellipsoid",
            Shape::CrossPolytope { .. } => "cross_polytope",
            Shape::VertexPolytope { .. } => "vertex_polytope",
        }
    }
}

/// A convex body: a local shape placed at `center` with orientation `rotation`.
///
/// World coordinates of a local point `p` are `center + rotation * p`. For the
/// centrally symmetric kinds the size parameters are kept sorted nonincreasing;
/// constructors permute the rotation columns accordingly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexBody {
    shape: Shape,
    center: Vector,
    rotation: Rotation,
}

/// Oriented bounding box in world coordinates.
#[derive(Clone, Copy, Debug)]
pub struct Obb {
    pub center: Vector,
    pub rotation: Rotation,
    pub half: Vector,
}

fn check_params(params: &Vector, dim: usize, what: &str) -> Result<()> {
    if params.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: params.dim(),
        });
    }
    if dim < 2 {
        return Err(Error::invalid("ambient dimension must be at least 2"));
    }
    if params.as_slice().iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::invalid(format!("{what} must be positive and finite")));
    }
    Ok(())
}

/// Sorts symmetric-shape parameters nonincreasing and permutes the frame to match.
fn canonicalize(params: Vector, rotation: Rotation) -> (Vector, Rotation) {
    let d = params.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| params[b].total_cmp(&params[a]));
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        return (params, rotation);
    }
    let mut sorted = Vector::zeros(d);
    let cols: Vec<Vector> = order
        .iter()
        .enumerate()
        .map(|(k, &o)| {
            sorted[k] = params[o];
            rotation.column(o)
        })
        .collect();
    let mut r = Rotation::from_columns_unchecked(&cols);
    if r.determinant() < 0.0 {
        // Symmetric shapes are invariant under reflecting one local axis.
        r.negate_column(d - 1);
    }
    (sorted, r)
}

impl ConvexBody {
    fn new_symmetric(
        params: Vector,
        center: Vector,
        rotation: Rotation,
        make: fn(Vector) -> Shape,
        what: &str,
    ) -> Result<Self> {
        let d = center.dim();
        check_params(&params, d, what)?;
        if rotation.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: rotation.dim(),
            });
        }
        let (params, rotation) = canonicalize(params, rotation);
        Ok(ConvexBody {
            shape: make(params),
            center,
            rotation,
        })
    }

    pub fn oriented_box(half_sides: Vector, center: Vector, rotation: Rotation) -> Result<Self> {
        Self::new_symmetric(
            half_sides,
            center,
            rotation,
            |h| Shape::OrientedBox { half_sides: h },
            "box half-sides",
        )
    }

    /// Axis-aligned box `[lower, upper]`.
    pub fn axis_box(lower: Vector, upper: Vector) -> Result<Self> {
        let center = (lower + upper) * 0.5;
        let half = (upper - lower) * 0.5;
        Self::oriented_box(half, center, Rotation::identity(lower.dim()))
    }

    pub fn ellipsoid(semi_axes: Vector, center: Vector, rotation: Rotation) -> Result<Self> {
        Self::new_symmetric(
            semi_axes,
            center,
            rotation,
            |a| Shape::Ellipsoid { semi_axes: a },
            "ellipsoid semi-axes",
        )
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        let d = center.dim();
        Self::ellipsoid(Vector::splat(d, radius), center, Rotation::identity(d))
    }

    pub fn cross_polytope(
        half_diameters: Vector,
        center: Vector,
        rotation: Rotation,
    ) -> Result<Self> {
        Self::new_symmetric(
            half_diameters,
            center,
            rotation,
            |h| Shape::CrossPolytope { half_diameters: h },
            "cross-polytope half-diameters",
        )
    }

    /// Convex hull of `vertices` (local frame), placed at `center` with `rotation`.
    pub fn polytope(vertices: Vec<Vector>, center: Vector, rotation: Rotation) -> Result<Self> {
        let d = center.dim();
        if rotation.dim() != d || vertices.iter().any(|v| v.dim() != d) {
            return Err(Error::invalid("polytope vertices must match the body dimension"));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite polytope vertex"));
        }
        if vertices.len() < d + 1 {
            return Err(Error::DegenerateBody);
        }
        let rows: Vec<Vec<f64>> = vertices[1..]
            .iter()
            .map(|v| (*v - vertices[0]).as_slice().to_vec())
            .collect();
        if linalg::rank(&rows, 1e-10) < d {
            return Err(Error::DegenerateBody);
        }
        Ok(ConvexBody {
            shape: Shape::VertexPolytope { vertices },
            center,
            rotation,
        })
    }

    /// Polytope from world-frame vertices, with identity rotation and the given center.
    pub fn polytope_world(vertices: &[Vector], center: Vector) -> Result<Self> {
        let local = vertices.iter().map(|v| *v - center).collect();
        Self::polytope(local, center, Rotation::identity(center.dim()))
    }

    /// Rebuilds a body from its parts, validating as the kind constructors do.
    pub fn from_parts(shape: Shape, center: Vector, rotation: Rotation) -> Result<Self> {
        match shape {
            Shape::OrientedBox { half_sides } => Self::oriented_box(half_sides, center, rotation),
            Shape::Ellipsoid { semi_axes } => Self::ellipsoid(semi_axes, center, rotation),
            Shape::CrossPolytope { half_diameters } => {
                Self::cross_polytope(half_diameters, center, rotation)
            }
            Shape::VertexPolytope { vertices } => Self::polytope(vertices, center, rotation),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    #[inline]
    pub fn center(&self) -> Vector {
        self.center
    }

    #[inline]
    pub fn rotation(&self) -> &Rotation {
        &self.rotation
    }

    #[inline]
    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    #[inline]
    pub fn to_world(&self, local: &Vector) -> Vector {
        self.center + self.rotation.apply(local)
    }

    #[inline]
    pub fn to_local(&self, world: &Vector) -> Vector {
        self.rotation.apply_transpose(&(*world - self.center))
    }

    /// Moves the body so its center sits at `center`.
    pub fn with_center(mut self, center: Vector) -> Self {
        assert_eq!(center.dim(), self.dim());
        self.center = center;
        self
    }

    /// Composes the body's orientation with `r` (rotation about the center).
    pub fn rotated(mut self, r: &Rotation) -> Self {
        self.rotation = r.compose(&self.rotation);
        self
    }

    /// Support point in local coordinates for a local direction.
    fn local_support(&self, l: &Vector) -> Vector {
        let d = self.dim();
        match &self.shape {
            Shape::OrientedBox { half_sides } => {
                let mut p = *half_sides;
                for i in 0..d {
                    if l[i] < 0.0 {
                        p[i] = -p[i];
                    }
                }
                p
            }
            Shape::Ellipsoid { semi_axes } => {
                let mut p = Vector::zeros(d);
                let mut norm2 = 0.0;
                for i in 0..d {
                    let al = semi_axes[i] * l[i];
                    norm2 += al * al;
                    p[i] = semi_axes[i] * al;
                }
                if norm2 > 0.0 {
                    p / norm2.sqrt()
                } else {
                    p
                }
            }
            Shape::CrossPolytope { half_diameters } => {
                let mut best = 0;
                let mut best_val = f64::NEG_INFINITY;
                for i in 0..d {
                    let v = half_diameters[i] * l[i].abs();
                    if v > best_val {
                        best_val = v;
                        best = i;
                    }
                }
                let mut p = Vector::zeros(d);
                p[best] = if l[best] < 0.0 {
                    -half_diameters[best]
                } else {
                    half_diameters[best]
                };
                p
            }
            Shape::VertexPolytope { vertices } => {
                let mut best = vertices[0];
                let mut best_val = best.dot(l);
                for v in &vertices[1..] {
                    let val = v.dot(l);
                    if val > best_val {
                        best_val = val;
                        best = *v;
                    }
                }
                best
            }
        }
    }

    /// A point of the body maximizing `<p, direction>`.
    #[inline]
    pub fn support(&self, direction: &Vector) -> Vector {
        let l = self.rotation.apply_transpose(direction);
        self.to_world(&self.local_support(&l))
    }

    /// Support function value `h(direction) = max <p, direction>`.
    #[inline]
    pub fn support_value(&self, direction: &Vector) -> f64 {
        self.support(direction).dot(direction)
    }

    /// Corners in the local frame, for the polytope kinds.
    pub fn local_vertices(&self) -> Option<Vec<Vector>> {
        let d = self.dim();
        match &self.shape {
            Shape::OrientedBox { half_sides } => Some(
                (0..1usize << d)
                    .map(|mask| {
                        let mut p = *half_sides;
                        for i in 0..d {
                            if mask & (1 << i) != 0 {
                                p[i] = -p[i];
                            }
                        }
                        p
                    })
                    .collect(),
            ),
            Shape::CrossPolytope { half_diameters } => Some(
                (0..d)
                    .flat_map(|i| {
                        let e = Vector::basis(d, i) * half_diameters[i];
                        [e, -e]
                    })
                    .collect(),
            ),
            Shape::VertexPolytope { vertices } => Some(vertices.clone()),
            Shape::Ellipsoid { .. } => None,
        }
    }

    pub fn world_vertices(&self) -> Option<Vec<Vector>> {
        self.local_vertices()
            .map(|vs| vs.iter().map(|v| self.to_world(v)).collect())
    }

    /// Radius of the smallest ball around the center containing the body.
    pub fn bounding_radius(&self) -> f64 {
        match &self.shape {
            Shape::OrientedBox { half_sides } => half_sides.norm(),
            Shape::Ellipsoid { semi_axes } => semi_axes.max_abs(),
            Shape::CrossPolytope { half_diameters } => half_diameters.max_abs(),
            Shape::VertexPolytope { vertices } => {
                vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
        }
    }

    /// Radius of a ball around the center known to lie inside the body (0 if unknown).
    pub fn inner_radius(&self) -> f64 {
        match &self.shape {
            Shape::OrientedBox { half_sides } => {
                half_sides.as_slice().iter().cloned().fold(f64::INFINITY, f64::min)
            }
            Shape::Ellipsoid { semi_axes } => {
                semi_axes.as_slice().iter().cloned().fold(f64::INFINITY, f64::min)
            }
            Shape::CrossPolytope { half_diameters } => {
                let s: f64 = half_diameters.as_slice().iter().map(|h| 1.0 / (h * h)).sum();
                1.0 / s.sqrt()
            }
            Shape::VertexPolytope { .. } => 0.0,
        }
    }

    /// First diameter `max |x - y|` over the body, in closed form.
    pub fn first_diameter(&self) -> f64 {
        match &self.shape {
            Shape::OrientedBox { half_sides } => 2.0 * half_sides.norm(),
            Shape::Ellipsoid { semi_axes } => 2.0 * semi_axes.max_abs(),
            Shape::CrossPolytope { half_diameters } => 2.0 * half_diameters.max_abs(),
            Shape::VertexPolytope { vertices } => {
                let mut best: f64 = 0.0;
                for (i, a) in vertices.iter().enumerate() {
                    for b in &vertices[i + 1..] {
                        best = best.max(a.distance(b));
                    }
                }
                best
            }
        }
    }

    pub fn obb(&self) -> Obb {
        let (offset, half) = match &self.shape {
            Shape::OrientedBox { half_sides } => (Vector::zeros(self.dim()), *half_sides),
            Shape::Ellipsoid { semi_axes } => (Vector::zeros(self.dim()), *semi_axes),
            Shape::CrossPolytope { half_diameters } => {
                (Vector::zeros(self.dim()), *half_diameters)
            }
            Shape::VertexPolytope { vertices } => {
                let mut lo = vertices[0];
                let mut hi = vertices[0];
                for v in vertices {
                    lo = lo.zip_map(v, f64::min);
                    hi = hi.zip_map(v, f64::max);
                }
                ((lo + hi) * 0.5, (hi - lo) * 0.5)
            }
        };
        Obb {
            center: self.to_world(&offset),
            rotation: self.rotation,
            half,
        }
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn aabb(&self) -> (Vector, Vector) {
        let d = self.dim();
        let mut lo = Vector::zeros(d);
        let mut hi = Vector::zeros(d);
        for i in 0..d {
            let e = Vector::basis(d, i);
            hi[i] = self.support(&e)[i];
            lo[i] = self.support(&-e)[i];
        }
        (lo, hi)
    }

    /// True iff `point` lies within distance `tol` of the body.
    pub fn contains(&self, point: &Vector, tol: f64) -> Result<bool> {
        if point.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.dim(),
            });
        }
        let l = self.to_local(point);
        let d = self.dim();
        match &self.shape {
            Shape::OrientedBox { half_sides } => {
                let mut excess2 = 0.0;
                for i in 0..d {
                    let e = (l[i].abs() - half_sides[i]).max(0.0);
                    excess2 += e * e;
                }
                Ok(excess2.sqrt() <= tol)
            }
            Shape::Ellipsoid { semi_axes } => {
                let q: f64 = (0..d).map(|i| (l[i] / semi_axes[i]).powi(2)).sum();
                if q <= 1.0 {
                    return Ok(true);
                }
                // Outside by at least the radial gap along the smallest axis.
                let amin = semi_axes.as_slice().iter().cloned().fold(f64::INFINITY, f64::min);
                if (q.sqrt() - 1.0) * amin > tol {
                    return Ok(false);
                }
                gjk::intersects(self, &gjk::PointShape(*point), tol)
            }
            Shape::CrossPolytope { half_diameters } => {
                let s: f64 = (0..d).map(|i| l[i].abs() / half_diameters[i]).sum();
                if s <= 1.0 {
                    return Ok(true);
                }
                gjk::intersects(self, &gjk::PointShape(*point), tol)
            }
            Shape::VertexPolytope { .. } => gjk::intersects(self, &gjk::PointShape(*point), tol),
        }
    }

    /// Scales the body about its center by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        let shape = match &self.shape {
            Shape::OrientedBox { half_sides } => Shape::OrientedBox {
                half_sides: *half_sides * factor,
            },
            Shape::Ellipsoid { semi_axes } => Shape::Ellipsoid {
                semi_axes: *semi_axes * factor,
            },
            Shape::CrossPolytope { half_diameters } => Shape::CrossPolytope {
                half_diameters: *half_diameters * factor,
            },
            Shape::VertexPolytope { vertices } => Shape::VertexPolytope {
                vertices: vertices.iter().map(|v| *v * factor).collect(),
            },
        };
        ConvexBody {
            shape,
            center: self.center,
            rotation: self.rotation,
        }
    }

    /// Shrinks the body so that its first diameter is at most `cap`.
    ///
    /// Ellipsoids and cross-polytopes clamp each size parameter at `cap / 2`; boxes
    /// clamp their half-sides at the common level whose diagonal is `cap`; vertex
    /// polytopes are scaled about the center. In every case the result is a subset
    /// of the input and grows monotonically with `cap`.
    pub fn clamp_first_diameter(&self, cap: f64) -> Self {
        if self.first_diameter() <= cap {
            return self.clone();
        }
        let shape = match &self.shape {
            Shape::Ellipsoid { semi_axes } => Shape::Ellipsoid {
                semi_axes: semi_axes.map(|a| a.min(cap / 2.0)),
            },
            Shape::CrossPolytope { half_diameters } => Shape::CrossPolytope {
                half_diameters: half_diameters.map(|a| a.min(cap / 2.0)),
            },
            Shape::OrientedBox { half_sides } => {
                let level = water_fill_level(half_sides.as_slice(), cap / 2.0);
                Shape::OrientedBox {
                    half_sides: half_sides.map(|a| a.min(level)),
                }
            }
            Shape::VertexPolytope { .. } => return self.scaled(cap / self.first_diameter()),
        };
        ConvexBody {
            shape,
            center: self.center,
            rotation: self.rotation,
        }
    }

    /// Volume in closed form for the parametric kinds; `None` for vertex polytopes in d > 2.
    pub fn volume(&self) -> Option<f64> {
        let d = self.dim();
        match &self.shape {
            Shape::OrientedBox { half_sides } => {
                Some(half_sides.as_slice().iter().map(|h| 2.0 * h).product())
            }
            Shape::Ellipsoid { semi_axes } => {
                let unit_ball = std::f64::consts::PI.powf(d as f64 / 2.0) / gamma_half_int(d + 2);
                Some(unit_ball * semi_axes.as_slice().iter().product::<f64>())
            }
            Shape::CrossPolytope { half_diameters } => {
                let fact: f64 = (1..=d).map(|k| k as f64).product();
                Some(2f64.powi(d as i32) * half_diameters.as_slice().iter().product::<f64>() / fact)
            }
            Shape::VertexPolytope { vertices } if d == 2 => {
                // Shoelace over the hull in angular order around the centroid.
                let n = vertices.len() as f64;
                let c = vertices.iter().fold(Vector::zeros(2), |a, v| a + *v) / n;
                let mut vs = vertices.clone();
                vs.sort_by(|a, b| {
                    (a[1] - c[1]).atan2(a[0] - c[0]).total_cmp(&(b[1] - c[1]).atan2(b[0] - c[0]))
                });
                let mut area = 0.0;
                for i in 0..vs.len() {
                    let (p, q) = (vs[i], vs[(i + 1) % vs.len()]);
                    area += p[0] * q[1] - q[0] * p[1];
                }
                Some(area.abs() / 2.0)
            }
            Shape::VertexPolytope { .. } => None,
        }
    }
}

/// `Gamma(k / 2)` for positive integers `k`.
fn gamma_half_int(k: usize) -> f64 {
    if k % 2 == 0 {
        (1..k / 2).map(|i| i as f64).product()
    } else {
        let mut g = std::f64::consts::PI.sqrt();
        let mut x = 0.5;
        while x < k as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Largest `t` with `sum_i min(h_i, t)^2 <= r^2`.
fn water_fill_level(h: &[f64], r: f64) -> f64 {
    let mut sorted: Vec<f64> = h.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut below = 0.0;
    for (k, &hk) in sorted.iter().enumerate() {
        let remaining = (n - k) as f64;
        let t = ((r * r - below) / remaining).max(0.0).sqrt();
        if t <= hk {
            return t;
        }
        below += hk * hk;
    }
    f64::INFINITY
}

impl SupportMap for ConvexBody {
    #[inline]
    fn dim(&self) -> usize {
        ConvexBody::dim(self)
    }
    #[inline]
    fn support(&self, direction: &Vector) -> Vector {
        ConvexBody::support(self, direction)
    }
    #[inline]
    fn interior_point(&self) -> Vector {
        match &self.shape {
            Shape::VertexPolytope { vertices } => {
                let n = vertices.len() as f64;
                let mean = vertices.iter().fold(Vector::zeros(self.dim()), |a, v| a + *v) / n;
                self.to_world(&mean)
            }
            _ => self.center,
        }
    }
}

const _: () = assert!(MAX_DIM >= 2);

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn v(c: &[f64]) -> Vector {
        Vector::from_slice(c)
    }

    #[test]
    fn ball_support_is_direction() {
        let b = ConvexBody::ball(Vector::zeros(3), 1.0).unwrap();
        let dir = v(&[1.0, 2.0, -2.0]) / 3.0;
        assert!((b.support(&dir) - dir).norm() < 1e-15);
    }

    #[test]
    fn box_support_along_axis() {
        let b = ConvexBody::oriented_box(v(&[1.0, 2.0]), Vector::zeros(2), Rotation::identity(2))
            .unwrap();
        let s = b.support(&Vector::basis(2, 1));
        assert!((s[1] - 2.0).abs() < 1e-15);
        assert!(s[0].abs() <= 1.0 + 1e-15);
        // Parameters are stored sorted; the frame absorbs the permutation.
        match b.shape() {
            Shape::OrientedBox { half_sides } => assert_eq!(half_sides.as_slice(), &[2.0, 1.0]),
            _ => unreachable!(),
        }
        assert!((b.rotation().determinant() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cross_polytope_vertex_support() {
        let c = ConvexBody::cross_polytope(v(&[2.0, 1.0]), Vector::zeros(2), Rotation::identity(2))
            .unwrap();
        assert_eq!(c.support(&v(&[1.0, 0.0])).as_slice(), &[2.0, 0.0]);
    }

    #[test]
    fn contains_examples() {
        let diamond =
            ConvexBody::cross_polytope(v(&[2.0, 1.0]), Vector::zeros(2), Rotation::identity(2))
                .unwrap();
        assert!(diamond.contains(&v(&[0.5, 0.25]), 1e-9).unwrap());
        assert!(diamond.contains(&Vector::zeros(2), 1e-9).unwrap());
        assert!(!diamond.contains(&v(&[8.0, 0.0]), 1e-9).unwrap());
        let e = ConvexBody::ellipsoid(v(&[3.0, 1.0]), v(&[1.0, 1.0]), Rotation::planar(0.3))
            .unwrap();
        assert!(e.contains(&v(&[1.0, 1.0]), 1e-9).unwrap());
        assert!(!e.contains(&v(&[13.0, 1.0]), 1e-9).unwrap());
    }

    #[test]
    fn degenerate_polytope_is_rejected() {
        let verts = vec![v(&[0.0, 0.0]), v(&[1.0, 1.0]), v(&[2.0, 2.0])];
        assert!(matches!(
            ConvexBody::polytope(verts, Vector::zeros(2), Rotation::identity(2)),
            Err(Error::DegenerateBody)
        ));
    }

    #[test]
    fn clamp_is_monotone_subset() {
        let b = ConvexBody::oriented_box(v(&[10.0, 0.5]), Vector::zeros(2), Rotation::planar(FRAC_PI_4))
            .unwrap();
        let small = b.clamp_first_diameter(5.0);
        let large = b.clamp_first_diameter(8.0);
        assert!((small.first_diameter() - 5.0).abs() < 1e-12);
        for p in small.world_vertices().unwrap() {
            assert!(large.contains(&p, 1e-9).unwrap());
            assert!(b.contains(&p, 1e-9).unwrap());
        }
        let tri = ConvexBody::polytope(
            vec![v(&[0.0, 0.0]), v(&[4.0, 0.0]), v(&[0.0, 1.0])],
            Vector::zeros(2),
            Rotation::identity(2),
        )
        .unwrap();
        assert!((tri.clamp_first_diameter(2.0).first_diameter() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn volumes() {
        let e = ConvexBody::ball(Vector::zeros(3), 2.0).unwrap();
        assert!((e.volume().unwrap() - 4.0 / 3.0 * std::f64::consts::PI * 8.0).abs() < 1e-12);
        let c = ConvexBody::cross_polytope(v(&[2.0, 1.0]), Vector::zeros(2), Rotation::identity(2))
            .unwrap();
        assert!((c.volume().unwrap() - 4.0).abs() < 1e-12);
        let tri = ConvexBody::polytope(
            vec![v(&[0.0, 0.0]), v(&[3.0, 0.0]), v(&[0.0, 2.0])],
            Vector::zeros(2),
            Rotation::identity(2),
        )
        .unwrap();
        assert!((tri.volume().unwrap() - 3.0).abs() < 1e-12);
    }
}
