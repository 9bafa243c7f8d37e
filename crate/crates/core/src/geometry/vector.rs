use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest ambient dimension supported by the geometry kernel.
pub const MAX_DIM: usize = 4;

/// A point or direction in `R^d`, `2 <= d <= MAX_DIM`, stored inline.
#[derive(Clone, Copy, PartialEq)]
pub struct Vector {
    dim: u8,
    c: [f64; MAX_DIM],
}

impl Vector {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Vector {
            dim: dim as u8,
            c: [0.0; MAX_DIM],
        }
    }

    /// Canonical basis vector `e_axis`.
    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.c[axis] = 1.0;
        v
    }

    pub fn try_from_slice(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::invalid(format!(
                "vector of length {} (supported: 1..={MAX_DIM})",
                coords.len()
            )));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite coordinate"));
        }
        let mut v = Self::zeros(coords.len());
        v.c[..coords.len()].copy_from_slice(coords);
        Ok(v)
    }

    /// Panics on invalid input; use [`Vector::try_from_slice`] for untrusted data.
    pub fn from_slice(coords: &[f64]) -> Self {
        Self::try_from_slice(coords).expect("invalid vector")
    }

    pub fn splat(dim: usize, value: f64) -> Self {
        let mut v = Self::zeros(dim);
        v.c[..dim].iter_mut().for_each(|x| *x = value);
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.c[..self.dim as usize]
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.c[..self.dim as usize]
    }

    #[inline]
    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for i in 0..self.dim as usize {
            s += self.c[i] * other.c[i];
        }
        s
    }

    #[inline]
    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        (*self - *other).norm()
    }

    /// Unit vector in the same direction, or `None` for (near) zero vectors.
    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        if n > 1e-300 && n.is_finite() {
            Some(*self / n)
        } else {
            None
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        let mut out = *self;
        out.as_mut_slice().iter_mut().for_each(|x| *x = f(*x));
        out
    }

    pub fn zip_map(&self, other: &Vector, f: impl Fn(f64, f64) -> f64) -> Vector {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for i in 0..self.dim() {
            out.c[i] = f(self.c[i], other.c[i]);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_finite())
    }

    /// Angle in `[0, pi]` between two nonzero vectors.
    pub fn angle_to(&self, other: &Vector) -> f64 {
        let denom = self.norm() * other.norm();
        (self.dot(other) / denom).clamp(-1.0, 1.0).acos()
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl IndexMut<usize> for Vector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.as_mut_slice()[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    #[inline]
    fn add(mut self, rhs: Vector) -> Vector {
        self += rhs;
        self
    }
}

impl AddAssign for Vector {
    #[inline]
    fn add_assign(&mut self, rhs: Vector) {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..MAX_DIM {
            self.c[i] += rhs.c[i];
        }
    }
}

impl Sub for Vector {
    type Output = Vector;
    #[inline]
    fn sub(mut self, rhs: Vector) -> Vector {
        self -= rhs;
        self
    }
}

impl SubAssign for Vector {
    #[inline]
    fn sub_assign(&mut self, rhs: Vector) {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..MAX_DIM {
            self.c[i] -= rhs.c[i];
        }
    }
}

impl Neg for Vector {
    type Output = Vector;
    #[inline]
    fn neg(mut self) -> Vector {
        for x in self.c.iter_mut() {
            *x = -*x;
        }
        self
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    #[inline]
    fn mul(mut self, s: f64) -> Vector {
        for x in self.c.iter_mut() {
            *x *= s;
        }
        self
    }
}

impl Mul<Vector> for f64 {
    type Output = Vector;
    #[inline]
    fn mul(self, v: Vector) -> Vector {
        v * self
    }
}

impl Div<f64> for Vector {
    type Output = Vector;
    #[inline]
    fn div(self, s: f64) -> Vector {
        self * (1.0 / s)
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(deserializer)?;
        Vector::try_from_slice(&coords).map_err(D::Error::custom)
    }
}

/// Orthogonal `d x d` matrix with determinant +1, stored by columns.
#[derive(Clone, Copy, PartialEq)]
pub struct Rotation {
    dim: u8,
    cols: [[f64; MAX_DIM]; MAX_DIM],
}

pub const ORTHONORMAL_TOL: f64 = 1e-12;

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        let mut cols = [[0.0; MAX_DIM]; MAX_DIM];
        for (i, col) in cols.iter_mut().enumerate() {
            col[i] = 1.0;
        }
        Rotation {
            dim: dim as u8,
            cols,
        }
    }

    /// Counter-clockwise rotation of the plane by `theta`.
    pub fn planar(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_columns_unchecked(&[Vector::from_slice(&[c, s]), Vector::from_slice(&[-s, c])])
    }

    /// Rotation by `theta` in the plane spanned by axes `i` and `j` of `R^d`.
    pub fn givens(dim: usize, i: usize, j: usize, theta: f64) -> Self {
        let mut r = Self::identity(dim);
        let (s, c) = theta.sin_cos();
        r.cols[i][i] = c;
        r.cols[i][j] = s;
        r.cols[j][i] = -s;
        r.cols[j][j] = c;
        r
    }

    pub(crate) fn from_columns_unchecked(columns: &[Vector]) -> Self {
        let dim = columns.len();
        let mut r = Self::identity(dim);
        for (j, col) in columns.iter().enumerate() {
            debug_assert_eq!(col.dim(), dim);
            r.cols[j][..dim].copy_from_slice(col.as_slice());
        }
        r
    }

    /// Builds a rotation from its columns, checking orthonormality and orientation.
    pub fn from_columns(columns: &[Vector]) -> Result<Self> {
        let dim = columns.len();
        if !(1..=MAX_DIM).contains(&dim) || columns.iter().any(|c| c.dim() != dim) {
            return Err(Error::invalid("rotation columns must form a square matrix"));
        }
        let r = Self::from_columns_unchecked(columns);
        if r.orthonormality_defect() > ORTHONORMAL_TOL * 10.0 {
            return Err(Error::invalid("rotation columns are not orthonormal"));
        }
        if (r.determinant() - 1.0).abs() > ORTHONORMAL_TOL * 10.0 {
            return Err(Error::invalid("rotation determinant is not +1"));
        }
        Ok(r)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn column(&self, j: usize) -> Vector {
        let mut v = Vector::zeros(self.dim());
        v.as_mut_slice().copy_from_slice(&self.cols[j][..self.dim()]);
        v
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.dim()).map(|j| self.column(j)).collect()
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.cols[col][row]
    }

    /// `R v`: local frame to world frame.
    #[inline]
    pub fn apply(&self, v: &Vector) -> Vector {
        let d = self.dim();
        let mut out = Vector::zeros(d);
        for j in 0..d {
            let vj = v[j];
            for i in 0..d {
                out[i] += self.cols[j][i] * vj;
            }
        }
        out
    }

    /// `R^T v`: world frame to local frame.
    #[inline]
    pub fn apply_transpose(&self, v: &Vector) -> Vector {
        let d = self.dim();
        let mut out = Vector::zeros(d);
        for j in 0..d {
            let mut s = 0.0;
            for i in 0..d {
                s += self.cols[j][i] * v[i];
            }
            out[j] = s;
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Rotation) -> Rotation {
        let cols: Vec<Vector> = (0..self.dim())
            .map(|j| self.apply(&other.column(j)))
            .collect();
        Self::from_columns_unchecked(&cols)
    }

    pub fn transpose(&self) -> Rotation {
        let d = self.dim();
        let mut r = *self;
        for i in 0..d {
            for j in 0..d {
                r.cols[j][i] = self.cols[i][j];
            }
        }
        r
    }

    /// Largest entry of `|R^T R - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += self.cols[i][k] * self.cols[j][k];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        let d = self.dim();
        let rows: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|j| self.cols[j][i]).collect())
            .collect();
        crate::geometry::linalg::determinant(rows)
    }

    /// Replaces column `j` with its negation.
    pub(crate) fn negate_column(&mut self, j: usize) {
        for x in self.cols[j].iter_mut() {
            *x = -*x;
        }
    }
}

impl fmt::Debug for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<f64>> = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.entry(i, j)).collect())
            .collect();
        f.debug_struct("Rotation").field("rows", &rows).finish()
    }
}

impl Serialize for Rotation {
    /// Serialized as a list of rows.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.entry(i, j)).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rotation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(D::Error::custom("rotation must be square"));
        }
        let cols: Vec<Vector> = (0..d)
            .map(|j| {
                let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
                Vector::try_from_slice(&col)
            })
            .collect::<Result<_>>()
            .map_err(D::Error::custom)?;
        // Serialized matrices lose a few ulps; accept them with a looser check.
        let r = Rotation::from_columns_unchecked(&cols);
        if r.orthonormality_defect() > 1e-9 || (r.determinant() - 1.0).abs() > 1e-9 {
            return Err(D::Error::custom("matrix is not a rotation"));
        }
        Ok(r)
    }
}
