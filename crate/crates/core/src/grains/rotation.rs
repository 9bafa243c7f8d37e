use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{Rotation, Vector, MAX_DIM};

/// Haar-uniform rotation of `R^d`.
///
/// Gram-Schmidt on a Gaussian matrix is the QR factorization with positive diagonal
/// in `R`, which makes `Q` Haar on the orthogonal group; flipping the last column
/// when `det Q = -1` gives the Haar law on the rotation group.
pub fn sample_rotation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Rotation> {
    if !(2..=MAX_DIM).contains(&d) {
        return Err(Error::invalid(format!("rotation dimension must be in 2..={MAX_DIM}")));
    }
    loop {
        let mut cols: Vec<Vector> = Vec::with_capacity(d);
        let mut ok = true;
        for _ in 0..d {
            let mut v = Vector::zeros(d);
            for i in 0..d {
                v[i] = rng.sample(StandardNormal);
            }
            // Two passes keep the columns orthonormal to rounding.
            for _ in 0..2 {
                for c in &cols {
                    v -= *c * v.dot(c);
                }
            }
            match v.normalized() {
                Some(u) if v.norm() > 1e-8 => cols.push(u),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let mut r = Rotation::from_columns_unchecked(&cols);
        if r.determinant() < 0.0 {
            r.negate_column(d - 1);
        }
        return Ok(r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grains::SeededRng;

    #[test]
    fn orthonormal_and_proper() {
        let mut g = SeededRng::new(3, 9).generator();
        for d in 2..=4 {
            for _ in 0..100 {
                let r = sample_rotation(d, &mut g).unwrap();
                assert!(r.orthonormality_defect() < 1e-12);
                assert!((r.determinant() - 1.0).abs() < 1e-12);
            }
        }
    }
}
