//! Constructive box inside the hull of a diameter configuration.
//!
//! Work happens in the frame spanned by the diameter orientations: coordinate `i`
//! measures along `p^(i+1)`. The first diameter is the segment `[-l1/2, l1/2] e1`.
//! At step `k` the current `k`-dimensional box `B_k` is lifted toward a hull point of
//! pair `k + 1` (the apex); the pyramid over `B_k` with that apex contains the
//! midpoint box, from which a box of the target side-lengths is cut.

use super::body::ConvexBody;
use super::vector::{Rotation, Vector};
use crate::error::{Error, Result};

/// An axis-aligned box in frame coordinates, as per-axis intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl FrameBox {
    pub fn sides(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).collect()
    }

    /// All `2^d` corners, bit `i` of the index choosing the upper end of axis `i`.
    pub fn corners(&self) -> Vec<Vector> {
        let d = self.lower.len();
        (0..1usize << d)
            .map(|mask| {
                let mut c = Vector::zeros(d);
                for i in 0..d {
                    c[i] = if mask & (1 << i) != 0 {
                        self.upper[i]
                    } else {
                        self.lower[i]
                    };
                }
                c
            })
            .collect()
    }
}

/// Which branch of the step was taken, for inspection in tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepCase {
    /// The apex projects into the current box.
    Inside,
    /// The apex was pulled toward the farthest corner first.
    Outside,
}

fn check_lengths(lengths: &[f64]) -> Result<()> {
    if lengths.len() < 2 {
        return Err(Error::invalid("need at least two lengths"));
    }
    if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::invalid("lengths must be positive and finite"));
    }
    if lengths.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::invalid("lengths must be nonincreasing"));
    }
    Ok(())
}

/// Runs the construction with caller-chosen corner pairs.
///
/// `pairs[k - 1]` holds the two hull points realizing diameter `k + 1` (frame
/// coordinates, zero beyond axis `k + 1`). Of each pair the point farther from the
/// current hyperplane is the apex; ties go to the first point. Each apex must sit at
/// height at least `l_{k+1} / 2`.
pub fn inscribed_box_frame(
    lengths: &[f64],
    pairs: &[[Vector; 2]],
) -> Result<(FrameBox, Vec<StepCase>)> {
    check_lengths(lengths)?;
    let d = lengths.len();
    if pairs.len() != d - 1 {
        return Err(Error::invalid("need one corner pair per diameter after the first"));
    }
    let mut lower = vec![0.0; d];
    let mut upper = vec![0.0; d];
    lower[0] = -lengths[0] / 2.0;
    upper[0] = lengths[0] / 2.0;
    let mut cases = Vec::with_capacity(d - 1);
    for k in 1..d {
        let [first, second] = &pairs[k - 1];
        for c in [first, second] {
            if c.dim() != d || c.as_slice()[k + 1..].iter().any(|x| x.abs() > 1e-12) {
                return Err(Error::invalid("corner leaves the current frame"));
            }
        }
        let mut apex = if second[k].abs() > first[k].abs() {
            *second
        } else {
            *first
        };
        let h = apex[k];
        if h.abs() < lengths[k] / 2.0 * (1.0 - 1e-12) {
            return Err(Error::invalid("corner height below half the diameter"));
        }
        let inside = (0..k).all(|i| apex[i] >= lower[i] && apex[i] <= upper[i]);
        if inside {
            cases.push(StepCase::Inside);
        } else {
            cases.push(StepCase::Outside);
            // Farthest corner y of B_k from the apex projection, then z on [y, apex].
            let mut y = Vector::zeros(d);
            for i in 0..k {
                y[i] = if (apex[i] - lower[i]).abs() >= (apex[i] - upper[i]).abs() {
                    lower[i]
                } else {
                    upper[i]
                };
            }
            let shrink = 2f64.powi(-2 * (k as i32 - 1));
            apex = (apex - y) * shrink + y;
            if !(0..k).all(|i| apex[i] >= lower[i] - 1e-12 && apex[i] <= upper[i] + 1e-12) {
                return Err(Error::invalid("pulled apex still projects outside the box"));
            }
        }
        // Midpoint box of the pyramid over B_k with this apex.
        let side = 2f64.powi(-2 * k as i32);
        for i in 0..k {
            let mid = ((lower[i] + apex[i]) / 2.0 + (upper[i] + apex[i]) / 2.0) / 2.0;
            let half = side * lengths[i] / 2.0;
            lower[i] = mid - half;
            upper[i] = mid + half;
        }
        let height = side * lengths[k];
        if apex[k] >= 0.0 {
            lower[k] = 0.0;
            upper[k] = height;
        } else {
            lower[k] = -height;
            upper[k] = 0.0;
        }
    }
    Ok((FrameBox { lower, upper }, cases))
}

/// Box with sides `2^{-2(d-1)} l_i` along `orientations`, inside the cross-polytope
/// `conv{center +- l_i/2 p_i}`.
pub fn inscribed_box(
    lengths: &[f64],
    orientations: &[Vector],
    center: &Vector,
) -> Result<ConvexBody> {
    check_lengths(lengths)?;
    let d = lengths.len();
    if orientations.len() != d || center.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: orientations.len(),
        });
    }
    for (i, a) in orientations.iter().enumerate() {
        for (j, b) in orientations.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            if (a.dot(b) - want).abs() > 1e-9 {
                return Err(Error::invalid("orientations must be orthonormal"));
            }
        }
    }
    let pairs: Vec<[Vector; 2]> = (1..d)
        .map(|k| {
            let e = Vector::basis(d, k) * (lengths[k] / 2.0);
            [e, -e]
        })
        .collect();
    let (frame, _) = inscribed_box_frame(lengths, &pairs)?;
    let mut offset = Vector::zeros(d);
    for i in 0..d {
        offset += orientations[i] * ((frame.lower[i] + frame.upper[i]) / 2.0);
    }
    let half = Vector::from_slice(
        &lengths
            .iter()
            .map(|l| l * 2f64.powi(-2 * (d as i32 - 1)) / 2.0)
            .collect::<Vec<_>>(),
    );
    let mut rot = Rotation::from_columns_unchecked(orientations);
    if rot.determinant() < 0.0 {
        // A box is symmetric in each axis, so reflecting one is harmless.
        rot.negate_column(d - 1);
    }
    ConvexBody::oriented_box(half, *center + offset, rot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn in_cross(lengths: &[f64], x: &Vector) -> bool {
        let s: f64 = lengths.iter().enumerate().map(|(i, l)| x[i].abs() / (l / 2.0)).sum();
        s <= 1.0 + 1e-12
    }

    #[test]
    fn symmetric_cases() {
        for lengths in [vec![2.0, 2.0], vec![4.0, 2.0], vec![8.0, 4.0, 2.0]] {
            let d = lengths.len();
            let orient: Vec<Vector> = (0..d).map(|i| Vector::basis(d, i)).collect();
            let b = inscribed_box(&lengths, &orient, &Vector::zeros(d)).unwrap();
            for c in b.world_vertices().unwrap() {
                assert!(in_cross(&lengths, &c), "{c:?}");
            }
        }
    }

    #[test]
    fn sides_8_4_2() {
        let pairs = [
            [Vector::from_slice(&[0.0, 2.0, 0.0]), Vector::from_slice(&[0.0, -2.0, 0.0])],
            [Vector::from_slice(&[0.0, 0.0, 1.0]), Vector::from_slice(&[0.0, 0.0, -1.0])],
        ];
        let (b, cases) = inscribed_box_frame(&[8.0, 4.0, 2.0], &pairs).unwrap();
        assert_eq!(b.sides(), vec![0.5, 0.25, 0.125]);
        assert_eq!(cases, vec![StepCase::Inside, StepCase::Inside]);
    }

    #[test]
    fn outside_case_is_taken() {
        let pairs = [
            [Vector::from_slice(&[0.0, 2.0, 0.0]), Vector::from_slice(&[0.0, -2.0, 0.0])],
            [Vector::from_slice(&[3.0, 0.0, 1.0]), Vector::from_slice(&[3.0, 0.0, -1.0])],
        ];
        let (b, cases) = inscribed_box_frame(&[8.0, 4.0, 2.0], &pairs).unwrap();
        assert_eq!(cases[1], StepCase::Outside);
        assert_eq!(b.sides(), vec![0.5, 0.25, 0.125]);
    }

    #[test]
    fn rejects_bad_lengths() {
        let o = [Vector::basis(2, 0), Vector::basis(2, 1)];
        assert!(inscribed_box(&[1.0, 0.0], &o, &Vector::zeros(2)).is_err());
        assert!(inscribed_box(&[1.0, 2.0], &o, &Vector::zeros(2)).is_err());
    }
}
