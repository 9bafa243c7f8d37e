use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use super::sampler::{cell_range, for_each_cell, Configuration};
use crate::geometry::{ConvexBody, Vector, MAX_DIM};

type Cell = [i64; MAX_DIM];

#[derive(Clone, Debug, Default)]
pub struct GridLayer {
    pub cell_size: f64,
    pub cells: FxHashMap<Cell, Vec<u32>>,
    pub ids: Vec<u32>,
}

/// Dyadic multi-resolution grid over bounding spheres.
///
/// Layer `j` has cell size `2^j` and holds the points whose bounding radius lies in
/// `[2^(j-1), 2^j)`, each in every cell its bounding sphere overlaps.
#[derive(Clone, Debug, Default)]
pub struct LayeredGrid {
    pub layers: BTreeMap<i32, GridLayer>,
    dim: usize,
    spheres: Vec<(Vector, f64)>,
}

/// Layer index of a bounding radius: `floor(log2 r) + 1`.
pub fn size_class(radius: f64) -> i32 {
    radius.log2().floor() as i32 + 1
}

fn sphere_overlaps_cell(center: &Vector, r: f64, cell: &[i64], side: f64) -> bool {
    let mut d2 = 0.0;
    for k in 0..center.dim() {
        let lo = cell[k] as f64 * side;
        let hi = lo + side;
        let e = if center[k] < lo {
            lo - center[k]
        } else if center[k] > hi {
            center[k] - hi
        } else {
            0.0
        };
        d2 += e * e;
    }
    d2 <= r * r
}

fn sphere_cells(center: &Vector, r: f64, side: f64, mut f: impl FnMut(&[i64])) {
    let rv = Vector::splat(center.dim(), r);
    let (lo, hi) = cell_range(&(*center - rv), &(*center + rv), side);
    let _ = for_each_cell(center.dim(), &lo, &hi, |c| {
        if sphere_overlaps_cell(center, r, c, side) {
            f(c);
        }
        Ok(())
    });
}

fn cell_count(center: &Vector, r: f64, side: f64) -> f64 {
    (0..center.dim())
        .map(|_| (2.0 * r / side).floor() + 2.0)
        .product()
}

fn key(c: &[i64]) -> Cell {
    let mut k = [0i64; MAX_DIM];
    k[..c.len()].copy_from_slice(c);
    k
}

impl LayeredGrid {
    pub fn new(dim: usize) -> Self {
        LayeredGrid {
            dim,
            ..Default::default()
        }
    }

    /// Appends a body; its id is the previous length.
    pub fn insert(&mut self, body: &ConvexBody) -> usize {
        let id = self.spheres.len();
        let c = body.center();
        let r = body.bounding_radius();
        let j = size_class(r);
        let layer = self.layers.entry(j).or_insert_with(|| GridLayer {
            cell_size: 2f64.powi(j),
            ..Default::default()
        });
        layer.ids.push(id as u32);
        let side = layer.cell_size;
        sphere_cells(&c, r, side, |cell| {
            layer.cells.entry(key(cell)).or_default().push(id as u32);
        });
        self.spheres.push((c, r));
        id
    }

    pub fn is_empty(&self) -> bool {
        self.spheres.is_empty()
    }

    pub fn len(&self) -> usize {
        self.spheres.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entries per layer: `(layer, distinct ids, cell entries)`.
    pub fn layer_stats(&self) -> Vec<(i32, usize, usize)> {
        self.layers
            .iter()
            .map(|(j, l)| (*j, l.ids.len(), l.cells.values().map(Vec::len).sum()))
            .collect()
    }

    /// Ids whose bounding sphere meets the probe's bounding sphere, sorted, without
    /// duplicates.
    pub fn query_candidates(&self, probe: &ConvexBody) -> Vec<usize> {
        self.query_sphere(&probe.center(), probe.bounding_radius())
    }

    pub fn query_sphere(&self, center: &Vector, radius: f64) -> Vec<usize> {
        let mut out: Vec<u32> = Vec::new();
        for layer in self.layers.values() {
            let before = out.len();
            // Scanning the layer's ids beats enumerating many empty cells.
            if cell_count(center, radius, layer.cell_size) > layer.ids.len() as f64 {
                out.extend(layer.ids.iter().copied());
            } else {
                sphere_cells(center, radius, layer.cell_size, |c| {
                    if let Some(ids) = layer.cells.get(&key(c)) {
                        out.extend(ids.iter().copied());
                    }
                });
            }
            let mut kept = before;
            for i in before..out.len() {
                let id = out[i];
                let (c, r) = &self.spheres[id as usize];
                if c.distance(center) <= r + radius {
                    out[kept] = id;
                    kept += 1;
                }
            }
            out.truncate(kept);
        }
        out.sort_unstable();
        out.dedup();
        out.into_iter().map(|i| i as usize).collect()
    }
}

/// Builds the layered grid of a configuration.
pub fn build_index(config: &Configuration) -> LayeredGrid {
    build_index_from_bodies(config.points.iter().map(|p| &p.grain), config.window.dim())
}

pub fn build_index_from_bodies<'a>(
    bodies: impl Iterator<Item = &'a ConvexBody>,
    dim: usize,
) -> LayeredGrid {
    let mut grid = LayeredGrid::new(dim);
    for body in bodies {
        grid.insert(body);
    }
    grid
}
