use serde::{Deserialize, Serialize};

use super::body::{ConvexBody, Shape};
use super::gjk::{PointCloud, SupportMap};
use super::vector::Vector;
use crate::error::{Error, Result};

pub const DEFAULT_RESOLUTION_2D: usize = 4096;
pub const DEFAULT_RESOLUTION_3D: usize = 16384;

pub fn default_resolution(dim: usize) -> usize {
    if dim <= 2 {
        DEFAULT_RESOLUTION_2D
    } else {
        DEFAULT_RESOLUTION_3D
    }
}

/// A region of a hyperplane represented by the hull of sample points.
///
/// The true region lies within `tolerance` of the sample hull.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectedRegion {
    pub normal: Vector,
    pub base: Vector,
    pub samples: Vec<Vector>,
    pub tolerance: f64,
}

impl ProjectedRegion {
    /// Largest distance of any sample from the hyperplane.
    pub fn plane_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (*s - self.base).dot(&self.normal).abs())
            .fold(0.0, f64::max)
    }

    pub fn as_support_map(&self) -> PointCloud<'_> {
        PointCloud(&self.samples)
    }
}

impl SupportMap for ProjectedRegion {
    fn dim(&self) -> usize {
        self.normal.dim()
    }
    fn support(&self, direction: &Vector) -> Vector {
        PointCloud(&self.samples).support(direction)
    }
    fn interior_point(&self) -> Vector {
        PointCloud(&self.samples).interior_point()
    }
}

pub(crate) fn check_unit(normal: &Vector) -> Result<()> {
    if (normal.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("normal must be a unit vector"));
    }
    Ok(())
}

#[inline]
pub fn project_point(x: &Vector, normal: &Vector, base: &Vector) -> Vector {
    *x - *normal * (*x - *base).dot(normal)
}

/// Orthonormal basis of the complement of `normal`.
pub fn complement_basis(normal: &Vector) -> Vec<Vector> {
    let d = normal.dim();
    let mut basis: Vec<Vector> = Vec::with_capacity(d - 1);
    for i in 0..d {
        let mut e = Vector::basis(d, i);
        e -= *normal * e.dot(normal);
        for b in &basis {
            e -= *b * e.dot(b);
        }
        if let Some(u) = e.normalized().filter(|_| e.norm() > 1e-6) {
            basis.push(u);
            if basis.len() == d - 1 {
                break;
            }
        }
    }
    basis
}

/// Roughly uniform unit directions spanning the complement of `normal`, with the
/// angular covering radius of the set.
pub fn tangent_directions(normal: &Vector, resolution: usize) -> (Vec<Vector>, f64) {
    let basis = complement_basis(normal);
    let d = normal.dim();
    let n = resolution.max(4);
    match basis.len() {
        1 => (vec![basis[0], -basis[0]], 0.0),
        2 => {
            let dirs = (0..n)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    basis[0] * t.cos() + basis[1] * t.sin()
                })
                .collect();
            (dirs, std::f64::consts::PI / n as f64)
        }
        _ => {
            // Fibonacci lattice on the 2-sphere of the complement (d = 4).
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            let dirs = (0..n)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    let mut u = Vector::zeros(d);
                    u += basis[0] * (r * t.cos());
                    u += basis[1] * (r * t.sin());
                    u += basis[2] * z;
                    u
                })
                .collect();
            (dirs, 2.0 * (std::f64::consts::PI / n as f64).sqrt() * 2.0)
        }
    }
}

/// Orthogonal projection of `body` onto the hyperplane through `base` with unit `normal`.
pub fn project(
    body: &ConvexBody,
    normal: &Vector,
    base: &Vector,
    resolution: usize,
) -> Result<ProjectedRegion> {
    check_unit(normal)?;
    if normal.dim() != body.dim() || base.dim() != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: normal.dim(),
        });
    }
    if resolution == 0 {
        return Err(Error::invalid("resolution must be positive"));
    }
    let (samples, tolerance) = match body.shape() {
        Shape::Ellipsoid { .. } => {
            let (dirs, theta) = tangent_directions(normal, resolution);
            let samples = dirs
                .iter()
                .map(|u| project_point(&body.support(u), normal, base))
                .collect();
            let tol = 2.0 * body.bounding_radius() * (1.0 - theta.min(1.5).cos()) + 1e-12;
            (samples, tol)
        }
        _ => {
            let verts = body.world_vertices().expect("polytope kinds list vertices");
            let samples = verts.iter().map(|p| project_point(p, normal, base)).collect();
            (samples, 1e-12 * (1.0 + body.bounding_radius()))
        }
    };
    Ok(ProjectedRegion {
        normal: *normal,
        base: *base,
        samples,
        tolerance,
    })
}
