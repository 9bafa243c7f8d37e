use serde::{Deserialize, Serialize};

use super::body::{ConvexBody, Shape};
use super::vector::Vector;
use crate::error::{Error, Result};

/// Iterated diameters `D^(1) >= ... >= D^(d)` with their orientations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterSequence {
    pub lengths: Vec<f64>,
    pub orientations: Vec<Vector>,
}

impl DiameterSequence {
    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    /// `D^(k)` with 1-based `k`.
    pub fn length(&self, k: usize) -> f64 {
        self.lengths[k - 1]
    }

    /// `p^(k)` with 1-based `k`.
    pub fn orientation(&self, k: usize) -> Vector {
        self.orientations[k - 1]
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.orientations.iter().enumerate() {
            for (j, b) in self.orientations.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dot(b) - want).abs());
            }
        }
        worst
    }
}

/// Diameter sequence of a body.
///
/// Polytopes are handled exactly over their vertices. Ellipsoids use the closed form:
/// the longest axis realizes the diameter, and projecting along a principal axis
/// leaves the ellipsoid of the remaining axes.
pub fn diameter_sequence(body: &ConvexBody) -> Result<DiameterSequence> {
    match body.shape() {
        Shape::Ellipsoid { semi_axes } => Ok(DiameterSequence {
            lengths: semi_axes.as_slice().iter().map(|a| 2.0 * a).collect(),
            orientations: body.rotation().columns(),
        }),
        _ => {
            let verts = body.world_vertices().expect("polytope kinds list vertices");
            point_set_diameters(&verts)
        }
    }
}

/// Diameter sequence of the convex hull of `points`.
///
/// At each stage the farthest pair is the first maximal pair in the scan order
/// `(i, j), i < j`; its direction is from point `i` to point `j`.
pub fn point_set_diameters(points: &[Vector]) -> Result<DiameterSequence> {
    let d = points.first().ok_or(Error::DegenerateBody)?.dim();
    let mut pts: Vec<Vector> = points.to_vec();
    let mut lengths = Vec::with_capacity(d);
    let mut orientations: Vec<Vector> = Vec::with_capacity(d);
    for _ in 0..d {
        let mut best = 0.0;
        let mut pair = (0, 0);
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let dist2 = (pts[j] - pts[i]).norm_squared();
                if dist2 > best {
                    best = dist2;
                    pair = (i, j);
                }
            }
        }
        let len = best.sqrt();
        if lengths.first().map_or(len == 0.0, |&d1: &f64| len <= 1e-12 * d1) {
            return Err(Error::DegenerateBody);
        }
        let mut dir = (pts[pair.1] - pts[pair.0]) / len;
        // Re-orthogonalize against earlier orientations to keep rounding from accumulating.
        for p in &orientations {
            dir -= *p * dir.dot(p);
        }
        let dir = dir.normalized().ok_or(Error::DegenerateBody)?;
        for p in pts.iter_mut() {
            *p -= dir * p.dot(&dir);
        }
        lengths.push(len);
        orientations.push(dir);
    }
    Ok(DiameterSequence {
        lengths,
        orientations,
    })
}
