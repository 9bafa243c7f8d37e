pub mod body;
pub mod diameters;
pub mod gjk;
pub mod inscribed;
pub mod linalg;
pub mod projection;
pub mod vector;

pub use body::{ConvexBody, Obb, Shape};
pub use diameters::{diameter_sequence, point_set_diameters, DiameterSequence};
pub use inscribed::{inscribed_box, inscribed_box_frame, FrameBox, StepCase};
pub use projection::{project, ProjectedRegion};
pub use vector::{Rotation, Vector, MAX_DIM};

use crate::error::Result;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Lower bound on the gap between two oriented boxes along their face normals.
/// Positive means the boxes are separated by at least that much.
pub fn obb_gap(a: &Obb, b: &Obb) -> f64 {
    let d = a.center.dim();
    let delta = b.center - a.center;
    let mut best = f64::NEG_INFINITY;
    for (owner, other) in [(a, b), (b, a)] {
        for j in 0..d {
            let u = owner.rotation.column(j);
            let mut r_other = 0.0;
            for i in 0..d {
                r_other += other.half[i] * other.rotation.column(i).dot(&u).abs();
            }
            let gap = delta.dot(&u).abs() - owner.half[j] - r_other;
            best = best.max(gap);
        }
    }
    best
}

/// True iff the distance between `a` and `b` is at most `tol`.
///
/// Cheap sphere and box tests settle most pairs; the rest go to the support-map
/// distance iteration.
pub fn intersects(a: &ConvexBody, b: &ConvexBody, tol: f64) -> Result<bool> {
    let dist = a.center().distance(&b.center());
    if dist > a.bounding_radius() + b.bounding_radius() + tol {
        return Ok(false);
    }
    // A vertex polytope's reference point may lie outside its hull.
    let centered = |x: &ConvexBody| !matches!(x.shape(), Shape::VertexPolytope { .. });
    if tol >= 0.0 && centered(a) && centered(b) && dist <= a.inner_radius() + b.inner_radius() {
        return Ok(true);
    }
    if obb_gap(&a.obb(), &b.obb()) > tol {
        return Ok(false);
    }
    gjk::intersects(a, b, tol)
}
