//! Cell-keyed sampling of the marked Poisson process.
//!
//! Grains are split into size classes by the primary uniform that sets their first
//! diameter; class `j` holds bounding radii in `(2^(j-1), 2^j]`. Each class is an
//! independent thinned Poisson process, generated per sub-cell of side
//! `2^min(j+1, 10)` from a stream keyed by (layer, class, sub-cell coordinates), and
//! each point draws from its own child stream. A realization is therefore a fixed
//! function of the replica stream: nested regions see nested point sets, and
//! superposed layers add points without moving existing ones.

use rand::Rng;
use rand_distr::{Distribution, Open01, Poisson};
use serde::{Deserialize, Serialize};

use super::window::{TruncationPolicy, Window};
use crate::error::{Error, Result};
use crate::geometry::{diameter_sequence, ConvexBody, DiameterSequence, Vector, MAX_DIM};
use crate::grains::{GrainFamily, SeededRng};

const LAYER_TAG: u64 = 1;
const PALM_TAG: u64 = 2;

/// Grains with primary uniform below this go to the overflow class.
const OVERFLOW_LEVEL: f64 = 1e-9;
pub(crate) const SUBCELL_MAX_LOG2: i32 = 10;

#[derive(Clone, Debug)]
pub(crate) struct StreamClass {
    pub u_lo: f64,
    pub u_hi: f64,
    /// Probability that a grain falls in this class.
    pub prob: f64,
    /// Bound on the untruncated bounding radius (infinite for the overflow class).
    pub radius_bound: f64,
    pub subcell_log2: i32,
}

impl StreamClass {
    pub fn subcell_side(&self) -> f64 {
        2f64.powi(self.subcell_log2)
    }
}

/// Size classes of a family under a truncation policy.
#[derive(Clone, Debug)]
pub(crate) struct ClassTable {
    pub classes: Vec<StreamClass>,
    pub u_floor: f64,
}

impl ClassTable {
    pub fn new(family: &GrainFamily, trunc: &TruncationPolicy) -> Self {
        let f = family.radius_factor();
        let radius_survival = |rho: f64| family.first_diameter_survival(rho / f);
        let r_top = f * family.first_diameter_at(OVERFLOW_LEVEL);
        let top = r_top.log2().ceil().max(0.0) as i32;
        let u_floor = trunc.primary_floor(family);
        let mut classes = Vec::with_capacity(top as usize + 2);
        let mut upper = 1.0;
        for j in 0..=top + 1 {
            let overflow = j == top + 1;
            let lower = if overflow { 0.0 } else { radius_survival(2f64.powi(j)) };
            let lo = lower.max(u_floor);
            let hi = upper;
            classes.push(StreamClass {
                u_lo: lo,
                u_hi: hi,
                prob: ((hi - lo) / (1.0 - u_floor)).max(0.0),
                radius_bound: if overflow {
                    f64::INFINITY
                } else {
                    2f64.powi(j) * (1.0 + 1e-9)
                },
                subcell_log2: (j + 1).min(SUBCELL_MAX_LOG2),
            });
            upper = lower.min(upper);
        }
        ClassTable { classes, u_floor }
    }
}

/// Draws one grain with primary uniform in `[u_lo, u_hi)`, truncated and placed at
/// `location`.
fn draw_grain<R: Rng>(
    family: &GrainFamily,
    trunc: &TruncationPolicy,
    u_lo: f64,
    u_hi: f64,
    location: Vector,
    g: &mut R,
) -> Result<ConvexBody> {
    let v: f64 = g.sample(Open01);
    let u = u_lo + (u_hi - u_lo) * v;
    let body = family.sample_at(u, g)?;
    Ok(trunc.apply(body).with_center(location))
}

/// Everything needed to generate points of one replica.
pub(crate) struct CellSampler<'a> {
    pub family: &'a GrainFamily,
    pub trunc: TruncationPolicy,
    pub table: ClassTable,
    pub replica: SeededRng,
    /// Intensity added by each superposition layer.
    pub increments: Vec<f64>,
    pub dim: usize,
}

impl<'a> CellSampler<'a> {
    pub fn new(
        family: &'a GrainFamily,
        trunc: TruncationPolicy,
        increments: Vec<f64>,
        replica: SeededRng,
    ) -> Result<Self> {
        family.validate()?;
        trunc.validate(family)?;
        if increments.iter().any(|&u| !(u >= 0.0 && u.is_finite())) {
            return Err(Error::invalid("intensity must be nonnegative and finite"));
        }
        Ok(CellSampler {
            family,
            table: ClassTable::new(family, &trunc),
            trunc,
            replica,
            increments,
            dim: family.dim(),
        })
    }

    /// Points of one sub-cell, in draw order.
    pub fn subcell(
        &self,
        layer: usize,
        class: usize,
        coords: &[i64],
        mut sink: impl FnMut(ConvexBody),
    ) -> Result<()> {
        let c = &self.table.classes[class];
        let side = c.subcell_side();
        let mean = self.increments[layer] * c.prob * side.powi(self.dim as i32);
        if !(mean > 0.0) {
            return Ok(());
        }
        let stream = self
            .replica
            .child(LAYER_TAG)
            .child(layer as u64)
            .child(class as u64)
            .child_coords(coords);
        let mut g = stream.generator();
        let n = Poisson::new(mean)
            .map_err(|e| Error::invalid(format!("poisson mean {mean}: {e}")))?
            .sample(&mut g) as u64;
        for i in 0..n {
            let mut pg = stream.child(i).generator();
            let mut loc = Vector::zeros(self.dim);
            for k in 0..self.dim {
                loc[k] = (coords[k] as f64 + pg.random::<f64>()) * side;
            }
            sink(draw_grain(self.family, &self.trunc, c.u_lo, c.u_hi, loc, &mut pg)?);
        }
        Ok(())
    }

    /// Grain of the `index`-th Palm point.
    pub fn palm_grain(&self, index: usize, location: Vector) -> Result<ConvexBody> {
        let mut g = self.replica.child(PALM_TAG).child(index as u64).generator();
        draw_grain(self.family, &self.trunc, self.table.u_floor, 1.0, location, &mut g)
    }
}

/// Integer cell range `[lo, hi]` per axis covering `[a, b]` at cell side `side`.
pub(crate) fn cell_range(a: &Vector, b: &Vector, side: f64) -> ([i64; MAX_DIM], [i64; MAX_DIM]) {
    let mut lo = [0i64; MAX_DIM];
    let mut hi = [0i64; MAX_DIM];
    for k in 0..a.dim() {
        lo[k] = (a[k] / side).floor() as i64;
        hi[k] = (b[k] / side).floor() as i64;
    }
    (lo, hi)
}

/// Calls `f` for every integer point of the box `[lo, hi]` in lexicographic order
/// (last axis fastest).
pub(crate) fn for_each_cell(
    dim: usize,
    lo: &[i64; MAX_DIM],
    hi: &[i64; MAX_DIM],
    mut f: impl FnMut(&[i64]) -> Result<()>,
) -> Result<()> {
    if (0..dim).any(|k| hi[k] < lo[k]) {
        return Ok(());
    }
    let mut cur = *lo;
    loop {
        f(&cur[..dim])?;
        let mut k = dim;
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            if cur[k] < hi[k] {
                cur[k] += 1;
                for r in k + 1..dim {
                    cur[r] = lo[r];
                }
                break;
            }
        }
    }
}

/// A point of a realized configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub id: usize,
    pub location: Vector,
    pub grain: ConvexBody,
    pub diameters: DiameterSequence,
    pub palm: bool,
    /// Superposition layer (0 for a single-intensity sample and for Palm points).
    pub layer: usize,
}

/// Realized marked point set in a window.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub window: Window,
    /// Total intensity.
    pub intensity: f64,
    /// Intensity added by each layer; a single entry for plain samples.
    pub increments: Vec<f64>,
    pub points: Vec<MarkedPoint>,
    pub truncation: TruncationPolicy,
    pub margin: f64,
}

impl Configuration {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn enlarged_window(&self) -> Window {
        self.window.inflate(self.margin)
    }

    pub fn palm_ids(&self) -> Vec<usize> {
        self.points.iter().filter(|p| p.palm).map(|p| p.id).collect()
    }

    /// Points present at the cumulative intensity of layers `0..=layer`.
    pub fn restricted_to_layer(&self, layer: usize) -> Configuration {
        let mut points: Vec<MarkedPoint> = self
            .points
            .iter()
            .filter(|p| p.palm || p.layer <= layer)
            .cloned()
            .collect();
        for (i, p) in points.iter_mut().enumerate() {
            p.id = i;
        }
        Configuration {
            window: self.window,
            intensity: self.increments[..=layer].iter().sum(),
            increments: self.increments[..=layer].to_vec(),
            points,
            truncation: self.truncation,
            margin: self.margin,
        }
    }
}

fn marked(id: usize, grain: ConvexBody, palm: bool, layer: usize) -> Result<MarkedPoint> {
    Ok(MarkedPoint {
        id,
        location: grain.center(),
        diameters: diameter_sequence(&grain)?,
        grain,
        palm,
        layer,
    })
}

/// Samples the process of intensity `u` in `window` enlarged by the truncation
/// margin, then appends Palm points at `palm_locations`.
pub fn sample_configuration(
    window: &Window,
    u: f64,
    family: &GrainFamily,
    trunc: &TruncationPolicy,
    palm_locations: &[Vector],
    rng: SeededRng,
) -> Result<Configuration> {
    if !(u >= 0.0) {
        return Err(Error::invalid(format!("intensity must be nonnegative, got {u}")));
    }
    sample_layered_configuration(window, &[u], family, trunc, palm_locations, rng)
}

/// Superposition of independent layers with the given intensity increments; layer
/// `k` of the result is the sample at intensity `increments[..=k].sum()`.
pub fn sample_layered_configuration(
    window: &Window,
    increments: &[f64],
    family: &GrainFamily,
    trunc: &TruncationPolicy,
    palm_locations: &[Vector],
    rng: SeededRng,
) -> Result<Configuration> {
    let d = family.dim();
    if window.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: window.dim(),
        });
    }
    if increments.is_empty() {
        return Err(Error::invalid("need at least one intensity layer"));
    }
    for p in palm_locations {
        if p.dim() != d || !window.contains(p) {
            return Err(Error::invalid("palm locations must lie inside the window"));
        }
    }
    let sampler = CellSampler::new(family, *trunc, increments.to_vec(), rng)?;
    let margin = trunc.margin(family);
    let region = window.inflate(margin);
    let mut points = Vec::new();
    for layer in 0..increments.len() {
        for (class, c) in sampler.table.classes.iter().enumerate() {
            if c.prob <= 0.0 {
                continue;
            }
            let (lo, hi) = cell_range(&region.lower, &region.upper, c.subcell_side());
            for_each_cell(d, &lo, &hi, |coords| {
                sampler.subcell(layer, class, coords, |grain| {
                    if region.contains(&grain.center()) {
                        points.push((grain, layer));
                    }
                })
            })?;
        }
    }
    let mut out = Vec::with_capacity(points.len() + palm_locations.len());
    for (grain, layer) in points {
        out.push(marked(out.len(), grain, false, layer)?);
    }
    for (i, loc) in palm_locations.iter().enumerate() {
        let grain = sampler.palm_grain(i, *loc)?;
        out.push(marked(out.len(), grain, true, 0)?);
    }
    Ok(Configuration {
        window: *window,
        intensity: increments.iter().sum(),
        increments: increments.to_vec(),
        points: out,
        truncation: *trunc,
        margin,
    })
}

/// Configuration from explicit bodies (all marked Palm), for hand-built scenarios.
pub fn configuration_from_bodies(
    window: &Window,
    bodies: Vec<ConvexBody>,
    palm: &[bool],
) -> Result<Configuration> {
    let mut points = Vec::with_capacity(bodies.len());
    for (i, b) in bodies.into_iter().enumerate() {
        points.push(marked(i, b, palm.get(i).copied().unwrap_or(false), 0)?);
    }
    Ok(Configuration {
        window: *window,
        intensity: 0.0,
        increments: vec![0.0],
        points,
        truncation: TruncationPolicy::none(),
        margin: 0.0,
    })
}
