use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Vector};
use crate::grains::GrainFamily;

/// Axis-aligned box `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lower: Vector,
    pub upper: Vector,
}

impl Window {
    pub fn new(lower: Vector, upper: Vector) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::DimensionMismatch {
                expected: lower.dim(),
                got: upper.dim(),
            });
        }
        if lower.dim() < 2 {
            return Err(Error::invalid("window dimension must be at least 2"));
        }
        if !lower.is_finite() || !upper.is_finite() {
            return Err(Error::invalid("window corners must be finite"));
        }
        if (0..lower.dim()).any(|i| upper[i] <= lower[i]) {
            return Err(Error::invalid("window upper corner must exceed the lower corner"));
        }
        Ok(Window { lower, upper })
    }

    /// Cube of side `side` centered at `center`.
    pub fn cube(center: Vector, side: f64) -> Result<Self> {
        let h = Vector::splat(center.dim(), side / 2.0);
        Self::new(center - h, center + h)
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn center(&self) -> Vector {
        (self.lower + self.upper) * 0.5
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.upper[i] - self.lower[i]).product()
    }

    pub fn diagonal(&self) -> f64 {
        (self.upper - self.lower).norm()
    }

    pub fn inflate(&self, margin: f64) -> Window {
        let m = Vector::splat(self.dim(), margin);
        Window {
            lower: self.lower - m,
            upper: self.upper + m,
        }
    }

    /// Closed-box membership.
    pub fn contains(&self, p: &Vector) -> bool {
        (0..self.dim()).all(|i| p[i] >= self.lower[i] && p[i] <= self.upper[i])
    }

    /// Half-open membership `[lower, upper)`, used to assign sampled points.
    pub fn contains_half_open(&self, p: &Vector) -> bool {
        (0..self.dim()).all(|i| p[i] >= self.lower[i] && p[i] < self.upper[i])
    }

    /// Whether `body` is not contained in the open window, i.e. reaches its boundary.
    pub fn body_reaches_boundary(&self, body: &ConvexBody) -> bool {
        let (lo, hi) = body.aabb();
        (0..self.dim()).any(|i| lo[i] <= self.lower[i] || hi[i] >= self.upper[i])
    }
}

/// Hard cap on the first diameter, applied by clamping or by resampling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub cap: Option<f64>,
    pub resample: bool,
}

/// Quantile level of `D^(1)` that sets the margin when no cap is given.
pub const UNCAPPED_MARGIN_LEVEL: f64 = 1.0 - 1e-6;

impl TruncationPolicy {
    pub fn none() -> Self {
        TruncationPolicy {
            cap: None,
            resample: false,
        }
    }

    pub fn clamp(cap: f64) -> Self {
        TruncationPolicy {
            cap: Some(cap),
            resample: false,
        }
    }

    pub fn resample(cap: f64) -> Self {
        TruncationPolicy {
            cap: Some(cap),
            resample: true,
        }
    }

    pub fn validate(&self, family: &GrainFamily) -> Result<()> {
        if let Some(cap) = self.cap {
            if !(cap > 0.0 && cap.is_finite()) {
                return Err(Error::invalid("cap must be positive and finite"));
            }
            if cap <= family.eps_interior {
                return Err(Error::invalid("cap must exceed eps_interior"));
            }
            if cap < family.min_first_diameter() {
                return Err(Error::invalid(format!(
                    "cap {cap} is below the smallest possible diameter {}",
                    family.min_first_diameter()
                )));
            }
        } else if self.resample {
            return Err(Error::invalid("resampling needs a cap"));
        }
        Ok(())
    }

    /// Window margin: the largest reach of a grain about its location.
    pub fn margin(&self, family: &GrainFamily) -> f64 {
        let d1 = self
            .cap
            .unwrap_or_else(|| family.first_diameter_quantile(UNCAPPED_MARGIN_LEVEL));
        family.radius_factor() * d1
    }

    /// Lower end of the primary uniform: resampling conditions on `D^(1) <= cap`.
    pub fn primary_floor(&self, family: &GrainFamily) -> f64 {
        match self.cap {
            Some(cap) if self.resample => family.first_diameter_survival(cap),
            _ => 0.0,
        }
    }

    pub fn apply(&self, body: ConvexBody) -> ConvexBody {
        match self.cap {
            Some(cap) => body.clamp_first_diameter(cap),
            None => body,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_basics() {
        let w = Window::cube(Vector::zeros(2), 10.0).unwrap();
        assert_eq!(w.volume(), 100.0);
        assert!(w.contains(&Vector::splat(2, 5.0)));
        assert!(!w.contains_half_open(&Vector::splat(2, 5.0)));
        assert!(Window::new(Vector::zeros(2), Vector::from_slice(&[1.0, 0.0])).is_err());
    }
}
