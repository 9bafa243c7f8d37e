//! Sector membership, shadow regions behind a grain, and the path-event search.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::thresholds::{threshold_sequence, ThresholdSequence};
use super::ModelExponents;
use crate::error::{Error, Result};
use crate::geometry::gjk;
use crate::geometry::projection::{default_resolution, project_point, tangent_directions};
use crate::geometry::{ConvexBody, ProjectedRegion, Rotation, Shape, Vector};
use crate::grains::SeededRng;
use crate::process::{
    build_index, configuration_from_bodies, Configuration, LayeredGrid, MarkedPoint, Window,
};

/// `pi / 2^kappa`.
pub fn default_phi(kappa: usize) -> f64 {
    PI / 2f64.powi(kappa as i32)
}

/// Whether `candidate` lies at distance `[f_i/2, f_i]` from the anchor and away from
/// the cones of half-angle `phi` around `±p^(j)`, `j <= kappa`.
pub fn in_o_i(
    anchor: &MarkedPoint,
    candidate: &Vector,
    f_i: f64,
    kappa: usize,
    phi: f64,
) -> Result<bool> {
    let x = anchor.location;
    let v = x - *candidate;
    let r = v.norm();
    if r == 0.0 {
        return Err(Error::invalid("candidate coincides with the anchor"));
    }
    if kappa == 0 || kappa > anchor.diameters.dim() {
        return Err(Error::invalid(format!("kappa {kappa} out of range")));
    }
    if r < 0.5 * f_i || r > f_i {
        return Ok(false);
    }
    for j in 1..=kappa {
        let p = anchor.diameters.orientation(j);
        if v.angle_to(&p) <= phi || v.angle_to(&-p) <= phi {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shadow of the anchor grain, clipped to the ball of radius `f_prev` about its
/// location, on the tangent hyperplane of that ball facing away from `toward`.
pub fn b_star(
    anchor: &MarkedPoint,
    toward: &Vector,
    f_prev: f64,
    resolution: usize,
) -> Result<ProjectedRegion> {
    if !(f_prev > 0.0) {
        return Err(Error::invalid("f_prev must be positive"));
    }
    let x = anchor.location;
    let delta = *toward - x;
    if delta.norm() == 0.0 {
        return Err(Error::invalid("toward coincides with the anchor"));
    }
    let normal = delta * (1.0 / delta.norm());
    let base = x - normal * f_prev;
    let body = &anchor.grain;
    let clamp = |s: Vector| {
        let r = (s - x).norm();
        if r > f_prev {
            x + (s - x) * (f_prev / r)
        } else {
            s
        }
    };
    let mut raw = vec![x];
    let tolerance = match body.shape() {
        Shape::Ellipsoid { .. } => {
            let (dirs, theta) = tangent_directions(&normal, resolution);
            raw.extend(dirs.iter().map(|u| body.support(u)));
            raw.push(body.support(&normal));
            raw.push(body.support(&-normal));
            let reach = body.bounding_radius().min(f_prev);
            2.0 * reach * (1.0 - theta.min(1.5).cos()) + 1e-12
        }
        _ => {
            raw.extend(body.world_vertices().expect("polytope kinds list vertices"));
            let (dirs, theta) = tangent_directions(&normal, resolution);
            raw.extend(dirs.iter().map(|u| body.support(u)));
            let reach = body.bounding_radius().min(f_prev);
            2.0 * reach * (1.0 - theta.min(1.5).cos()) + 1e-12
        }
    };
    let samples = raw
        .into_iter()
        .map(|s| project_point(&clamp(s), &normal, &base))
        .collect();
    Ok(ProjectedRegion {
        normal,
        base,
        samples,
        tolerance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathVariant {
    /// Lower bound on `D^(kappa)` and upper bound on `D^(1)`.
    A,
    /// Lower bound on `D^(kappa)` only.
    ABar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub id: usize,
    pub threshold: f64,
    pub diameter_ok: bool,
    /// `None` for the variant without an upper bound.
    pub upper_ok: Option<bool>,
    pub sector_ok: bool,
    pub bstar_ok: bool,
}

impl StepRecord {
    pub fn passed(&self) -> bool {
        self.diameter_ok && self.upper_ok.unwrap_or(true) && self.sector_ok && self.bstar_ok
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathWitness {
    pub start: usize,
    pub ids: Vec<usize>,
    pub steps: Vec<StepRecord>,
}

struct StepContext<'a> {
    config: &'a Configuration,
    thresholds: &'a ThresholdSequence,
    variant: PathVariant,
    phi: f64,
    resolution: usize,
}

impl StepContext<'_> {
    /// All checks of step `i` (1-based) from `prev` to `cand`, short-circuiting on
    /// the first failure.
    fn step(&self, i: usize, prev: usize, cand: usize) -> Result<StepRecord> {
        let t = self.thresholds;
        let (f_i, f_prev) = (t.f[i], t.f[i - 1]);
        let anchor = &self.config.points[prev];
        let p = &self.config.points[cand];
        let factor = t.diameter_factor();
        let mut rec = StepRecord {
            id: cand,
            threshold: f_i,
            diameter_ok: p.diameters.length(t.kappa) >= factor * f_i,
            upper_ok: None,
            sector_ok: false,
            bstar_ok: false,
        };
        if self.variant == PathVariant::A {
            let bound = factor * f_i.powf(2.0 * t.alpha_kappa / t.alpha_1);
            rec.upper_ok = Some(p.diameters.length(1) <= bound);
        }
        if !rec.diameter_ok || rec.upper_ok == Some(false) {
            return Ok(rec);
        }
        rec.sector_ok = in_o_i(anchor, &p.location, f_i, t.kappa, self.phi)?;
        if !rec.sector_ok {
            return Ok(rec);
        }
        let region = b_star(anchor, &p.location, f_prev, self.resolution)?;
        rec.bstar_ok = gjk::intersects(&p.grain, &region, region.tolerance)
            .map_err(|e| Error::Pair { a: prev, b: cand, source: Box::new(e) })?;
        Ok(rec)
    }
}

/// Upper bound on candidates tried per step before backtracking.
const MAX_BRANCH: usize = 64;

fn search(
    ctx: &StepContext,
    index: &LayeredGrid,
    path: &mut Vec<usize>,
    steps: &mut Vec<StepRecord>,
    n: usize,
) -> Result<bool> {
    let i = path.len();
    if i > n {
        return Ok(true);
    }
    let prev = path[i - 1];
    let x = ctx.config.points[prev].location;
    let f_i = ctx.thresholds.f[i];
    let mut tried = 0;
    for cand in index.query_sphere(&x, f_i) {
        if path.contains(&cand) || ctx.config.points[cand].location == x {
            continue;
        }
        let r = ctx.config.points[cand].location.distance(&x);
        if r < 0.5 * f_i || r > f_i {
            continue;
        }
        let rec = ctx.step(i, prev, cand)?;
        if !rec.passed() {
            continue;
        }
        tried += 1;
        path.push(cand);
        steps.push(rec);
        if search(ctx, index, path, steps, n)? {
            return Ok(true);
        }
        path.pop();
        steps.pop();
        if tried >= MAX_BRANCH {
            break;
        }
    }
    Ok(false)
}

/// Depth-first search, in increasing id order, for distinct points `x_1..x_n`
/// satisfying every step condition from `start`. Returns the first witness found.
#[allow(clippy::too_many_arguments)]
pub fn check_path_event(
    config: &Configuration,
    index: &LayeredGrid,
    start: usize,
    n: usize,
    thresholds: &ThresholdSequence,
    variant: PathVariant,
    phi: Option<f64>,
) -> Result<Option<PathWitness>> {
    if start >= config.len() {
        return Err(Error::InvalidId(start));
    }
    if thresholds.steps() < n {
        return Err(Error::invalid(format!(
            "{} thresholds cannot cover {n} steps",
            thresholds.f.len()
        )));
    }
    if index.len() != config.len() {
        return Err(Error::invalid("index does not match the configuration"));
    }
    let ctx = StepContext {
        config,
        thresholds,
        variant,
        phi: phi.unwrap_or_else(|| default_phi(thresholds.kappa)),
        resolution: default_resolution(config.window.dim()),
    };
    let mut path = vec![start];
    let mut steps = Vec::new();
    if search(&ctx, index, &mut path, &mut steps, n)? {
        Ok(Some(PathWitness {
            start,
            ids: path[1..].to_vec(),
            steps,
        }))
    } else {
        Ok(None)
    }
}

/// Recomputes every step of `witness` from scratch; true iff all checks pass and
/// the points are distinct.
pub fn revalidate(
    config: &Configuration,
    witness: &PathWitness,
    thresholds: &ThresholdSequence,
    variant: PathVariant,
    phi: Option<f64>,
) -> Result<bool> {
    let ctx = StepContext {
        config,
        thresholds,
        variant,
        phi: phi.unwrap_or_else(|| default_phi(thresholds.kappa)),
        resolution: default_resolution(config.window.dim()),
    };
    let mut all = vec![witness.start];
    all.extend(&witness.ids);
    if all.iter().any(|&id| id >= config.len()) || witness.ids.len() > thresholds.steps() {
        return Ok(false);
    }
    let mut sorted = all.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != all.len() {
        return Ok(false);
    }
    for i in 1..all.len() {
        if !ctx.step(i, all[i - 1], all[i])?.passed() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A hand-built configuration with a path planted through the sectors.
#[derive(Clone, Debug)]
pub struct PlantedScenario {
    pub config: Configuration,
    pub index: LayeredGrid,
    pub start: usize,
    /// Planted path ids, in order (empty steps removed in the adversarial case).
    pub planted: Vec<usize>,
    pub thresholds: ThresholdSequence,
    pub phi: f64,
    pub variant: PathVariant,
}

/// Planar scenario with tail indices `(1.5, inf)`, `epsilon = 0.1`, `f_0 = 10` and
/// `phi = pi/4`. Each planted grain is a long thin ellipse pointing back through its
/// predecessor, placed perpendicular to the predecessor's long axis. Small decoy
/// grains are scattered around. With `adversarial`, the first planted point is moved
/// onto the start grain's axis, which empties the first sector.
pub fn planted_configuration(seed: u64, n: usize, adversarial: bool) -> Result<PlantedScenario> {
    if n == 0 || n > 2 {
        return Err(Error::invalid("planted scenarios support 1 or 2 steps"));
    }
    let exp = ModelExponents::new(2, vec![1.5, f64::INFINITY])?;
    let thresholds = threshold_sequence(10.0, &exp, 0.1, n)?;
    let phi = PI / 4.0;
    let factor = thresholds.diameter_factor();
    let mut g = SeededRng::new(seed, 0x5eed).generator();
    let psi: f64 = g.random_range(0.0..2.0 * PI);
    let dir = |a: f64| Vector::from_slice(&[a.cos(), a.sin()]);

    let mut bodies = Vec::new();
    let start_axis = psi;
    bodies.push(ConvexBody::ellipsoid(
        Vector::from_slice(&[thresholds.f[0], 1.0]),
        Vector::zeros(2),
        Rotation::planar(start_axis),
    )?);
    let mut planted_bodies = Vec::new();
    let (mut loc, mut axis) = (Vector::zeros(2), start_axis);
    for i in 1..=n {
        let f_i = thresholds.f[i];
        let sign = if g.random::<bool>() { 1.0 } else { -1.0 };
        let mut heading = axis + sign * PI / 2.0 + g.random_range(-0.2..0.2);
        if adversarial && i == 1 {
            heading = axis;
        }
        let r = g.random_range(0.6..0.9) * f_i;
        loc = loc + dir(heading) * r;
        let semi = 0.5 * g.random_range(1.1..1.5) * factor * f_i;
        planted_bodies.push(ConvexBody::ellipsoid(
            Vector::from_slice(&[semi, 0.5]),
            loc,
            Rotation::planar(heading),
        )?);
        axis = heading;
    }
    let span = 2.0 * thresholds.f[n];
    // Decoys are interleaved so planted ids are not simply the smallest.
    let mut planted = Vec::new();
    for b in planted_bodies {
        for _ in 0..g.random_range(0..5) {
            bodies.push(decoy(&mut g, span)?);
        }
        planted.push(bodies.len());
        bodies.push(b);
    }
    for _ in 0..40 {
        bodies.push(decoy(&mut g, span)?);
    }
    let reach = bodies
        .iter()
        .map(|b| b.center().norm() + b.bounding_radius())
        .fold(0.0, f64::max);
    let window = Window::cube(Vector::zeros(2), 2.0 * reach + 2.0)?;
    let mut palm = vec![false; bodies.len()];
    palm[0] = true;
    let config = configuration_from_bodies(&window, bodies, &palm)?;
    let index = build_index(&config);
    Ok(PlantedScenario {
        config,
        index,
        start: 0,
        planted,
        thresholds,
        phi,
        variant: PathVariant::A,
    })
}

fn decoy<R: Rng>(g: &mut R, span: f64) -> Result<ConvexBody> {
    let c = Vector::from_slice(&[g.random_range(-span..span), g.random_range(-span..span)]);
    let a = g.random_range(0.5..3.0);
    let b = g.random_range(0.2..a);
    ConvexBody::ellipsoid(
        Vector::from_slice(&[a, b]),
        c,
        Rotation::planar(g.random_range(0.0..PI)),
    )
}
