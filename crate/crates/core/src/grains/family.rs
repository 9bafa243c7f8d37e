use rand::Rng;
use rand_distr::Open01;
use serde::{Deserialize, Serialize};

use super::rotation::sample_rotation;
use super::tail::TailLaw;
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Shape, Vector, MAX_DIM};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyKind {
    /// Ellipsoid with `d - m` long axes of common length `R ~ law` and `m` axes of length 1.
    EllipsoidLongShort { d: usize, m: usize, law: TailLaw },
    /// Ellipsoid with independent Pareto semi-axes; indices must be nondecreasing.
    EllipsoidIndependent { d: usize, laws: Vec<TailLaw> },
    /// Ellipsoid with axis lengths `U^(-beta_i)` for one shared uniform `U`.
    EllipsoidDependent { d: usize, betas: Vec<f64> },
    /// Right triangle with hypotenuse `R ~ law` and area `R^(1+beta) / 4`.
    RightTriangle { law: TailLaw, beta: f64 },
    /// Box with `k` sides of common length `s ~ law` and `d - k` sides of length `thin`.
    Box { d: usize, k: usize, law: TailLaw, thin: f64 },
}

/// A grain law. Every size parameter is floored at `eps_interior`, so each grain
/// contains a ball of that radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrainFamily {
    pub kind: FamilyKind,
    pub eps_interior: f64,
}

/// Integrability of volume and first diameter under a family law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentFlags {
    pub vol_l1: bool,
    pub vol_l2: bool,
    pub d1_ld: bool,
}

/// Legs `(a, b)` with `a >= b` of the right triangle with hypotenuse `r` and area
/// `r^(1+beta) / 4`. Needs `r >= 1`.
pub fn triangle_legs(r: f64, beta: f64) -> (f64, f64) {
    let ab = r.powf(1.0 + beta) / 2.0;
    let r2 = r * r;
    let disc = (r2 * r2 - 4.0 * ab * ab).max(0.0).sqrt();
    let a2 = (r2 + disc) / 2.0;
    // b^2 from the product keeps precision when b is small.
    let b2 = ab * ab / a2;
    (a2.sqrt(), b2.sqrt())
}

fn triangle_inradius(r: f64, beta: f64) -> f64 {
    let (a, b) = triangle_legs(r, beta);
    (a + b - r) / 2.0
}

impl GrainFamily {
    pub fn new(kind: FamilyKind, eps_interior: f64) -> Result<Self> {
        let f = GrainFamily { kind, eps_interior };
        f.validate()?;
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            FamilyKind::EllipsoidLongShort { d, .. }
            | FamilyKind::EllipsoidIndependent { d, .. }
            | FamilyKind::EllipsoidDependent { d, .. }
            | FamilyKind::Box { d, .. } => *d,
            FamilyKind::RightTriangle { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if !(2..=MAX_DIM).contains(&d) {
            return Err(Error::invalid(format!("dimension must be in 2..={MAX_DIM}")));
        }
        if !(self.eps_interior > 0.0 && self.eps_interior.is_finite()) {
            return Err(Error::invalid("eps_interior must be positive"));
        }
        match &self.kind {
            FamilyKind::EllipsoidLongShort { m, law, .. } => {
                law.validate()?;
                if *m >= d {
                    return Err(Error::invalid("need at least one long axis (m < d)"));
                }
            }
            FamilyKind::EllipsoidIndependent { laws, .. } => {
                if laws.len() != d {
                    return Err(Error::invalid("need one law per axis"));
                }
                for law in laws {
                    law.validate()?;
                    if !matches!(law, TailLaw::Pareto { .. }) {
                        return Err(Error::invalid("independent axes need Pareto laws"));
                    }
                }
                if laws.windows(2).any(|w| w[1].alpha() < w[0].alpha()) {
                    return Err(Error::invalid("axis tail indices must be nondecreasing"));
                }
            }
            FamilyKind::EllipsoidDependent { betas, .. } => {
                if betas.len() != d {
                    return Err(Error::invalid("need one exponent per axis"));
                }
                if betas.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
                    return Err(Error::invalid("exponents must be positive"));
                }
                if betas.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::invalid("exponents must be nondecreasing"));
                }
            }
            FamilyKind::RightTriangle { law, beta } => {
                law.validate()?;
                if !(*beta > 0.0 && *beta < 1.0) {
                    return Err(Error::invalid("triangle beta must lie in (0, 1)"));
                }
                if self.eps_interior > triangle_inradius(1.0, *beta) {
                    return Err(Error::invalid("eps_interior exceeds the smallest triangle's inradius"));
                }
            }
            FamilyKind::Box { k, law, thin, .. } => {
                law.validate()?;
                if *k == 0 || *k > d {
                    return Err(Error::invalid("heavy side count must be in 1..=d"));
                }
                if !(*thin > 0.0 && thin.is_finite()) {
                    return Err(Error::invalid("thin side must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Tail index of `D^(k)` for `k = 1..d`.
    pub fn tail_index_vector(&self) -> Vec<f64> {
        let d = self.dim();
        match &self.kind {
            FamilyKind::EllipsoidLongShort { m, law, .. } => (0..d)
                .map(|k| if k < d - m { law.alpha() } else { f64::INFINITY })
                .collect(),
            FamilyKind::EllipsoidIndependent { laws, .. } => laws
                .iter()
                .scan(0.0, |acc, l| {
                    *acc += l.alpha();
                    Some(*acc)
                })
                .collect(),
            FamilyKind::EllipsoidDependent { betas, .. } => {
                (0..d).map(|k| 1.0 / betas[d - 1 - k]).collect()
            }
            FamilyKind::RightTriangle { law, beta } => vec![law.alpha(), law.alpha() / beta],
            FamilyKind::Box { k, law, .. } => (0..d)
                .map(|i| if i < *k { law.alpha() } else { f64::INFINITY })
                .collect(),
        }
    }

    /// Volume and diameter integrability in closed form.
    pub fn moment_flags(&self) -> MomentFlags {
        let d = self.dim() as f64;
        // Vol ~ X^v and D1 ~ X^w for a variable X with tail index a.
        let (a, v, w) = match &self.kind {
            FamilyKind::EllipsoidLongShort { m, law, .. } => (law.alpha(), d - *m as f64, 1.0),
            FamilyKind::EllipsoidIndependent { laws, .. } => {
                // E[prod R_i^p] is finite iff p is below every index; D1 is the max.
                (laws[0].alpha(), 1.0, 1.0)
            }
            FamilyKind::EllipsoidDependent { betas, .. } => {
                // U^(-s) has tail index 1/s.
                let sum: f64 = betas.iter().sum();
                let max = betas.iter().cloned().fold(0.0, f64::max);
                (1.0, sum, max)
            }
            FamilyKind::RightTriangle { law, beta } => (law.alpha(), 1.0 + beta, 1.0),
            FamilyKind::Box { k, law, .. } => (law.alpha(), *k as f64, 1.0),
        };
        MomentFlags {
            vol_l1: v < a,
            vol_l2: 2.0 * v < a,
            d1_ld: d * w < a,
        }
    }

    /// Bounding radius about the grain's location in units of `D^(1)`.
    pub fn radius_factor(&self) -> f64 {
        match self.kind {
            FamilyKind::RightTriangle { .. } => 1.0,
            _ => 0.5,
        }
    }

    /// First diameter of the grain drawn with primary uniform `u`; nonincreasing in `u`.
    pub fn first_diameter_at(&self, u: f64) -> f64 {
        let eps = self.eps_interior;
        match &self.kind {
            FamilyKind::EllipsoidLongShort { law, .. } => {
                2.0 * (law.upper_quantile(u) / 2.0).max(0.5).max(eps)
            }
            FamilyKind::EllipsoidIndependent { laws, .. } => 2.0 * max_radius(laws, u).max(eps),
            FamilyKind::EllipsoidDependent { betas, .. } => {
                let top = betas[betas.len() - 1];
                2.0 * (u.powf(-top) / 2.0).max(eps)
            }
            FamilyKind::RightTriangle { law, .. } => law.upper_quantile(u).max(1.0),
            FamilyKind::Box { d, k, law, thin } => {
                let s = (law.upper_quantile(u) / 2.0).max(eps);
                let t = (thin / 2.0).max(eps);
                2.0 * (*k as f64 * s * s + (*d - *k) as f64 * t * t).sqrt()
            }
        }
    }

    /// Smallest possible first diameter.
    pub fn min_first_diameter(&self) -> f64 {
        self.first_diameter_at(1.0)
    }

    /// The `q`-quantile of `D^(1)`.
    pub fn first_diameter_quantile(&self, q: f64) -> f64 {
        self.first_diameter_at(1.0 - q)
    }

    /// `P(D^(1) > t)`, by bisection on the primary uniform.
    pub fn first_diameter_survival(&self, t: f64) -> f64 {
        if self.first_diameter_at(1.0) > t {
            return 1.0;
        }
        // Largest u with D1(u) > t; D1 is nonincreasing in u.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = if lo == 0.0 { hi * 1e-3 } else { (lo * hi).sqrt() };
            if mid <= lo || mid >= hi {
                break;
            }
            if self.first_diameter_at(mid) > t {
                lo = mid;
            } else {
                hi = mid;
            }
            if lo > 0.0 && hi / lo < 1.0 + 1e-13 {
                break;
            }
            if hi < 1e-300 {
                return 0.0;
            }
        }
        lo
    }

    /// Grain drawn with primary uniform `u` (controls `D^(1)`), centered at the
    /// origin; the rest of the randomness comes from `aux`.
    pub fn sample_at<R: Rng + ?Sized>(&self, u: f64, aux: &mut R) -> Result<ConvexBody> {
        let d = self.dim();
        let eps = self.eps_interior;
        let rot = sample_rotation(d, aux)?;
        let origin = Vector::zeros(d);
        let floor = |x: f64| x.max(eps);
        match &self.kind {
            FamilyKind::EllipsoidLongShort { m, law, .. } => {
                let r = law.upper_quantile(u);
                let mut axes = Vector::zeros(d);
                for i in 0..d {
                    axes[i] = floor(if i < d - m { r / 2.0 } else { 0.5 });
                }
                ConvexBody::ellipsoid(axes, origin, rot)
            }
            FamilyKind::EllipsoidIndependent { laws, .. } => {
                let radii = independent_radii(laws, u, aux);
                ConvexBody::ellipsoid(Vector::from_slice(&radii).map(floor), origin, rot)
            }
            FamilyKind::EllipsoidDependent { betas, .. } => {
                let mut axes = Vector::zeros(d);
                for i in 0..d {
                    axes[i] = floor(u.powf(-betas[i]) / 2.0);
                }
                ConvexBody::ellipsoid(axes, origin, rot)
            }
            FamilyKind::RightTriangle { law, beta } => {
                let r = law.upper_quantile(u).max(1.0);
                let (a, b) = triangle_legs(r, *beta);
                let corners = [
                    Vector::zeros(2),
                    Vector::from_slice(&[a, 0.0]),
                    Vector::from_slice(&[0.0, b]),
                ];
                let pick = aux.random_range(0..3);
                let verts = corners.iter().map(|c| *c - corners[pick]).collect();
                ConvexBody::polytope(verts, origin, rot)
            }
            FamilyKind::Box { k, law, thin, .. } => {
                let s = law.upper_quantile(u);
                let mut half = Vector::zeros(d);
                for i in 0..d {
                    half[i] = floor(if i < *k { s / 2.0 } else { thin / 2.0 });
                }
                ConvexBody::oriented_box(half, origin, rot)
            }
        }
    }

    /// Draws a grain centered at the origin.
    pub fn sample_grain<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ConvexBody> {
        let u: f64 = rng.sample(Open01);
        self.sample_at(u, rng)
    }
}

/// Draws a grain from `family`.
pub fn sample_grain<R: Rng + ?Sized>(family: &GrainFamily, rng: &mut R) -> Result<ConvexBody> {
    family.validate()?;
    family.sample_grain(rng)
}

/// Center of the largest guaranteed interior ball: the incenter for triangles, the
/// location otherwise.
pub fn interior_anchor(body: &ConvexBody) -> Vector {
    match body.shape() {
        Shape::VertexPolytope { vertices } if vertices.len() == 3 && body.dim() == 2 => {
            let w: Vec<Vector> = vertices.iter().map(|v| body.to_world(v)).collect();
            let a = w[1].distance(&w[2]);
            let b = w[0].distance(&w[2]);
            let c = w[0].distance(&w[1]);
            (w[0] * a + w[1] * b + w[2] * c) / (a + b + c)
        }
        _ => body.center(),
    }
}

/// `P(max R_i > t)` for independent laws.
fn max_survival(laws: &[TailLaw], t: f64) -> f64 {
    let log_cdf: f64 = laws.iter().map(|l| (-l.survival(t)).ln_1p()).sum();
    -log_cdf.exp_m1()
}

/// Value of `max R_i` with upper-tail probability `u`.
fn max_radius(laws: &[TailLaw], u: f64) -> f64 {
    let lo0 = laws.iter().map(|l| l.minimum()).fold(0.0, f64::max);
    if u >= 1.0 || max_survival(laws, lo0) <= u {
        return lo0;
    }
    let n = laws.len() as f64;
    // Each tail below u/n bounds the max tail by u.
    let mut hi = laws
        .iter()
        .map(|l| l.upper_quantile((u / n).min(1.0)))
        .fold(lo0, f64::max);
    while max_survival(laws, hi) > u {
        hi *= 2.0;
    }
    let mut lo = lo0;
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if max_survival(laws, mid) > u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-15 {
            break;
        }
    }
    hi
}

/// Independent radii whose maximum has upper-tail probability `u`: the arg-max index
/// is drawn proportionally to `f_i(M) prod_{k != i} F_k(M)` and the others come from
/// their laws conditioned below `M`.
fn independent_radii<R: Rng + ?Sized>(laws: &[TailLaw], u: f64, aux: &mut R) -> Vec<f64> {
    let m = max_radius(laws, u);
    let cdf: Vec<f64> = laws.iter().map(|l| 1.0 - l.survival(m)).collect();
    let weights: Vec<f64> = (0..laws.len())
        .map(|i| {
            let others: f64 = (0..laws.len()).filter(|&k| k != i).map(|k| cdf[k]).product();
            laws[i].density(m) * others
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let top = if total > 0.0 && total.is_finite() {
        let mut x = aux.random::<f64>() * total;
        let mut pick = laws.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if x < *w {
                pick = i;
                break;
            }
            x -= w;
        }
        pick
    } else {
        aux.random_range(0..laws.len())
    };
    laws.iter()
        .enumerate()
        .map(|(i, l)| {
            if i == top {
                return m;
            }
            let v: f64 = aux.random();
            // Inverse transform of the law restricted to [x_min, m].
            let target = v * cdf[i];
            match *l {
                TailLaw::Pareto { alpha, x_min } => {
                    (x_min * (1.0 - target).powf(-1.0 / alpha)).min(m)
                }
                TailLaw::Degenerate { value } => value,
            }
        })
        .collect()
}

impl GrainFamily {
    /// The rotation-free grain of the long/short family, for tests and examples.
    pub fn long_short(d: usize, m: usize, law: TailLaw, eps_interior: f64) -> Result<Self> {
        Self::new(FamilyKind::EllipsoidLongShort { d, m, law }, eps_interior)
    }
}
