//! On-demand realization of the process for graph searches.
//!
//! Sub-cells of the cell-stream sampler are generated only when a search needs to
//! know which grains can meet a given grain, so the realization agrees exactly with
//! the one materialized in any window, while far-reaching searches stay cheap.
//! Grains are bucketed per (layer, grid class) in a raster of cells; a query
//! rasterizes the probe into every grid and tests the bucket members exactly.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};

use super::index::LayeredGrid;
use super::raster::{rasterize, Cell};
use super::sampler::CellSampler;
use super::window::{TruncationPolicy, Window};
use crate::error::{Error, Result};
use crate::geometry::{intersects, ConvexBody, Obb, Vector, MAX_DIM};
use crate::grains::{GrainFamily, SeededRng};

const PALM_LAYER: u8 = u8::MAX;

#[derive(Clone, Debug)]
struct GridSpec {
    /// Largest bounding radius among grains of this grid.
    reach: f64,
    raster_side: f64,
    block_side: f64,
    /// Stream classes routed to this grid, with their sub-cell side.
    classes: Vec<(usize, f64)>,
}

/// Lazily realized marked process, optionally restricted to a region.
pub struct LazyProcess<'a> {
    sampler: CellSampler<'a>,
    region: Option<Window>,
    tol: f64,
    grids: Vec<GridSpec>,
    buckets: Vec<FxHashMap<Cell, Vec<u32>>>,
    blocks: FxHashSet<(u32, Cell)>,
    subcells: FxHashSet<(u32, u32, Cell)>,
    bodies: Vec<ConvexBody>,
    layer_of: Vec<u8>,
    palms: Vec<u32>,
    scratch: Vec<Cell>,
}

impl<'a> LazyProcess<'a> {
    /// Needs a cap so every grain has bounded reach. With `region` set, only points
    /// whose location lies in the region are realized.
    pub fn new(
        family: &'a GrainFamily,
        trunc: TruncationPolicy,
        increments: Vec<f64>,
        replica: SeededRng,
        region: Option<Window>,
        tol: f64,
    ) -> Result<Self> {
        let cap = trunc
            .cap
            .ok_or_else(|| Error::invalid("the lazy engine needs a cap"))?;
        if increments.is_empty() || increments.len() >= PALM_LAYER as usize {
            return Err(Error::invalid("need between 1 and 254 intensity layers"));
        }
        if let Some(w) = &region {
            if w.dim() != family.dim() {
                return Err(Error::DimensionMismatch {
                    expected: family.dim(),
                    got: w.dim(),
                });
            }
        }
        let sampler = CellSampler::new(family, trunc, increments, replica)?;
        let reach_max = family.radius_factor() * cap * (1.0 + 1e-9);
        let j_cap = reach_max.log2().ceil().max(0.0) as usize;
        let mut grids: Vec<GridSpec> = Vec::new();
        for (c, class) in sampler.table.classes.iter().enumerate() {
            if class.prob <= 0.0 {
                continue;
            }
            let g = c.min(j_cap);
            while grids.len() <= g {
                let k = grids.len() as i32;
                grids.push(GridSpec {
                    reach: 0.0,
                    raster_side: (2f64.powi(k + 1) / 64.0).max(2.0),
                    block_side: 2f64.powi((k + 1).min(super::sampler::SUBCELL_MAX_LOG2)),
                    classes: Vec::new(),
                });
            }
            let spec = &mut grids[g];
            spec.reach = spec.reach.max(class.radius_bound.min(reach_max));
            spec.classes.push((c, class.subcell_side()));
        }
        let layers = sampler.increments.len();
        Ok(LazyProcess {
            buckets: vec![FxHashMap::default(); layers * grids.len()],
            sampler,
            region,
            tol,
            grids,
            blocks: FxHashSet::default(),
            subcells: FxHashSet::default(),
            bodies: Vec::new(),
            layer_of: Vec::new(),
            palms: Vec::new(),
            scratch: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.sampler.dim
    }

    pub fn layers(&self) -> usize {
        self.sampler.increments.len()
    }

    /// Number of grains realized so far.
    pub fn realized(&self) -> usize {
        self.bodies.len()
    }

    pub fn subcells_generated(&self) -> usize {
        self.subcells.len()
    }

    pub fn body(&self, id: u32) -> &ConvexBody {
        &self.bodies[id as usize]
    }

    /// Superposition layer of a point, `None` for Palm points.
    pub fn layer(&self, id: u32) -> Option<usize> {
        match self.layer_of[id as usize] {
            PALM_LAYER => None,
            l => Some(l as usize),
        }
    }

    /// Inserts the next Palm point; its grain matches the window sampler's grain for
    /// the same Palm index.
    pub fn add_palm(&mut self, location: Vector) -> Result<u32> {
        if location.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: location.dim(),
            });
        }
        let grain = self.sampler.palm_grain(self.palms.len(), location)?;
        let id = self.bodies.len() as u32;
        self.bodies.push(grain);
        self.layer_of.push(PALM_LAYER);
        self.palms.push(id);
        Ok(id)
    }

    fn bucket_index(&self, layer: usize, g: usize) -> usize {
        layer * self.grids.len() + g
    }

    fn generate_block(&mut self, layer: usize, g: usize, block: &Cell) -> Result<()> {
        let d = self.dim();
        let bside = self.grids[g].block_side;
        let bi = self.bucket_index(layer, g);
        let raster_side = self.grids[g].raster_side;
        for ci in 0..self.grids[g].classes.len() {
            let (class, sub) = self.grids[g].classes[ci];
            // Blocks and sub-cells are nested dyadic grids.
            let mut lo = [0i64; MAX_DIM];
            let mut hi = [0i64; MAX_DIM];
            if sub >= bside {
                let k = (sub / bside).round() as i64;
                for a in 0..d {
                    lo[a] = block[a].div_euclid(k);
                    hi[a] = lo[a];
                }
            } else {
                let k = (bside / sub).round() as i64;
                for a in 0..d {
                    lo[a] = block[a] * k;
                    hi[a] = lo[a] + k - 1;
                }
            }
            let mut subcells = Vec::new();
            super::sampler::for_each_cell(d, &lo, &hi, |c| {
                let mut key = [0i64; MAX_DIM];
                key[..d].copy_from_slice(c);
                subcells.push(key);
                Ok(())
            })?;
            for coords in subcells {
                // A sub-cell larger than the block is shared with sibling blocks.
                if !self.subcells.insert((layer as u32, class as u32, coords)) {
                    continue;
                }
                let mut fresh = Vec::new();
                self.sampler.subcell(layer, class, &coords[..d], |grain| {
                    fresh.push(grain);
                })?;
                for grain in fresh {
                    if let Some(r) = &self.region {
                        if !r.contains(&grain.center()) {
                            continue;
                        }
                    }
                    let id = self.bodies.len() as u32;
                    self.scratch.clear();
                    rasterize(&grain.obb(), raster_side, &mut self.scratch);
                    for cell in &self.scratch {
                        self.buckets[bi].entry(*cell).or_default().push(id);
                    }
                    self.bodies.push(grain);
                    self.layer_of.push(layer as u8);
                }
            }
        }
        Ok(())
    }

    /// Realizes everything of `(layer, g)` that could meet a body inside `obb`.
    fn ensure(&mut self, layer: usize, g: usize, obb: &Obb) -> Result<()> {
        let spec = &self.grids[g];
        let mut grown = obb.clone();
        for a in 0..grown.half.dim() {
            grown.half[a] += spec.reach;
        }
        let mut blocks = Vec::new();
        rasterize(&grown, spec.block_side, &mut blocks);
        let tag = self.bucket_index(layer, g) as u32;
        for b in blocks {
            if self.blocks.insert((tag, b)) {
                self.generate_block(layer, g, &b)?;
            }
        }
        Ok(())
    }

    /// Sorted ids of all points of layers `0..=max_layer` (and all Palm points)
    /// whose grain meets the grain of `id`.
    pub fn neighbors(&mut self, id: u32, max_layer: usize) -> Result<Vec<u32>> {
        if id as usize >= self.bodies.len() {
            return Err(Error::InvalidId(id as usize));
        }
        if max_layer >= self.layers() {
            return Err(Error::invalid(format!("layer {max_layer} does not exist")));
        }
        let probe = self.bodies[id as usize].clone();
        let obb = probe.obb();
        let mut cand: Vec<u32> = self.palms.clone();
        let mut cells = Vec::new();
        for layer in 0..=max_layer {
            for g in 0..self.grids.len() {
                self.ensure(layer, g, &obb)?;
                cells.clear();
                rasterize(&obb, self.grids[g].raster_side, &mut cells);
                let bucket = &self.buckets[self.bucket_index(layer, g)];
                for c in &cells {
                    if let Some(ids) = bucket.get(c) {
                        cand.extend_from_slice(ids);
                    }
                }
            }
        }
        cand.sort_unstable();
        cand.dedup();
        let mut out = Vec::new();
        for other in cand {
            if other == id {
                continue;
            }
            let (lo, hi) = if id < other { (id, other) } else { (other, id) };
            let a = &self.bodies[lo as usize];
            let b = &self.bodies[hi as usize];
            let hit = intersects(a, b, self.tol).map_err(|e| Error::Pair {
                a: lo as usize,
                b: hi as usize,
                source: Box::new(e),
            })?;
            if hit {
                out.push(other);
            }
        }
        Ok(out)
    }
}

/// Result of a budgeted search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Connected(usize),
    Disconnected,
    /// The node budget ran out first.
    Unresolved,
}

/// One side of a bidirectional search: exact breadth-first layers plus an index of
/// every body reached so far.
struct Side {
    dist: FxHashMap<u32, usize>,
    frontier: Vec<u32>,
    depth: usize,
    index: LayeredGrid,
    ids: Vec<u32>,
}

impl Side {
    fn new(root: u32, p: &LazyProcess) -> Self {
        let mut s = Side {
            dist: FxHashMap::default(),
            frontier: Vec::new(),
            depth: 0,
            index: LayeredGrid::new(p.dim()),
            ids: Vec::new(),
        };
        s.dist.insert(root, 0);
        s.frontier.push(root);
        s
    }

    fn record(&mut self, p: &LazyProcess, layer: &[u32]) {
        for &v in layer {
            self.index.insert(p.body(v));
            self.ids.push(v);
        }
    }
}

/// Best path length through a node of `layer` (at depth `depth` of its side) and the
/// reached set of `other`: shared nodes count `depth + d`, touching grains
/// `depth + d + 1`.
fn crossing(
    p: &LazyProcess,
    layer: &[u32],
    depth: usize,
    other: &Side,
) -> Result<Option<usize>> {
    let mut best: Option<usize> = None;
    let keep = |best: &mut Option<usize>, x: usize| *best = Some(best.map_or(x, |b| b.min(x)));
    for &v in layer {
        if let Some(&d) = other.dist.get(&v) {
            keep(&mut best, depth + d);
            continue;
        }
        let body = p.body(v);
        for k in other.index.query_candidates(body) {
            let w = other.ids[k];
            let d = other.dist[&w];
            if best.is_some_and(|b| b <= depth + d + 1) {
                continue;
            }
            let (lo, hi) = if v < w { (v, w) } else { (w, v) };
            let hit = intersects(p.body(lo), p.body(hi), p.tol).map_err(|e| Error::Pair {
                a: lo as usize,
                b: hi as usize,
                source: Box::new(e),
            })?;
            if hit {
                keep(&mut best, depth + d + 1);
            }
        }
    }
    Ok(best)
}

/// Chemical distance between `a` and `b` by bidirectional breadth-first search.
///
/// Each new layer is checked against everything the other side has reached, so the
/// search stops once the sides touch, without expanding the last layers.
/// `node_budget` bounds the number of expanded nodes.
pub fn lazy_chemical_distance(
    p: &mut LazyProcess,
    a: u32,
    b: u32,
    max_layer: usize,
    node_budget: usize,
) -> Result<SearchOutcome> {
    for id in [a, b] {
        if id as usize >= p.realized() {
            return Err(Error::InvalidId(id as usize));
        }
    }
    if a == b {
        return Ok(SearchOutcome::Connected(0));
    }
    let mut sides = [Side::new(a, p), Side::new(b, p)];
    sides[0].record(p, &[a]);
    let mut best = crossing(p, &[b], 0, &sides[0])?;
    sides[1].record(p, &[b]);
    let mut expanded = 0usize;
    loop {
        // Every path of length <= depth_a + depth_b + 1 crosses between the reached
        // sets, so a crossing that short is the distance.
        if let Some(d) = best {
            if d <= sides[0].depth + sides[1].depth + 1 {
                return Ok(SearchOutcome::Connected(d));
            }
        }
        let s = if sides[0].frontier.len() <= sides[1].frontier.len() { 0 } else { 1 };
        if sides[s].frontier.is_empty() {
            // The component of one endpoint is exhausted.
            return Ok(best.map_or(SearchOutcome::Disconnected, SearchOutcome::Connected));
        }
        let frontier = std::mem::take(&mut sides[s].frontier);
        let depth = sides[s].depth + 1;
        let mut next = Vec::new();
        for &v in &frontier {
            if expanded >= node_budget {
                return Ok(SearchOutcome::Unresolved);
            }
            expanded += 1;
            for w in p.neighbors(v, max_layer)? {
                if !sides[s].dist.contains_key(&w) {
                    sides[s].dist.insert(w, depth);
                    next.push(w);
                }
            }
        }
        if let Some(c) = crossing(p, &next, depth, &sides[1 - s])? {
            best = Some(best.map_or(c, |x| x.min(c)));
        }
        sides[s].record(p, &next);
        sides[s].depth = depth;
        sides[s].frontier = next;
    }
}

/// Whether the cluster of `start` at layers `0..=max_layer` contains a grain that is
/// not inside the open window. `None` when the budget runs out.
pub fn lazy_reaches_boundary(
    p: &mut LazyProcess,
    start: u32,
    window: &Window,
    max_layer: usize,
    node_budget: usize,
) -> Result<Option<bool>> {
    if start as usize >= p.realized() {
        return Err(Error::InvalidId(start as usize));
    }
    let mut seen = FxHashSet::default();
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    let mut expanded = 0usize;
    while let Some(v) = queue.pop_front() {
        if window.body_reaches_boundary(p.body(v)) {
            return Ok(Some(true));
        }
        if expanded >= node_budget {
            return Ok(None);
        }
        expanded += 1;
        for w in p.neighbors(v, max_layer)? {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    Ok(Some(false))
}
