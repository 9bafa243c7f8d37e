//! Intersection graphs, chemical distances, components and the θ proxy.

use std::collections::VecDeque;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{intersects, ConvexBody, Vector, DEFAULT_TOL};
use crate::grains::{GrainFamily, SeededRng};
use crate::process::{
    build_index, build_index_from_bodies, lazy_reaches_boundary, sample_layered_configuration,
    Configuration, LayeredGrid, LazyProcess, TruncationPolicy, Window,
};

/// Undirected simple graph with sorted adjacency lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntersectionGraph {
    adj: Vec<Vec<usize>>,
}

impl IntersectionGraph {
    /// Graph on `n` vertices from an edge list; duplicates and both orientations are
    /// accepted, self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidId(a.max(b)));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at {a}")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        Ok(IntersectionGraph { adj })
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, l) in self.adj.iter().enumerate() {
            out.extend(l.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    /// Symmetric, sorted, and free of self-loops.
    pub fn is_well_formed(&self) -> bool {
        self.adj.iter().enumerate().all(|(i, l)| {
            l.windows(2).all(|w| w[0] < w[1])
                && l.iter()
                    .all(|&j| j != i && j < self.adj.len() && self.adj[j].binary_search(&i).is_ok())
        })
    }

    /// Writes one sorted pair `i j` per line.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}")?;
        }
        Ok(())
    }
}

/// Exact intersection graph of a configuration, using `index` for candidates.
pub fn build_graph(config: &Configuration, index: &LayeredGrid) -> Result<IntersectionGraph> {
    build_graph_with_tol(config, index, DEFAULT_TOL)
}

pub fn build_graph_with_tol(
    config: &Configuration,
    index: &LayeredGrid,
    tol: f64,
) -> Result<IntersectionGraph> {
    let bodies: Vec<&ConvexBody> = config.points.iter().map(|p| &p.grain).collect();
    graph_over(&bodies, index, tol)
}

/// Intersection graph of bare bodies, indexed internally.
pub fn graph_from_bodies(bodies: &[ConvexBody], tol: f64) -> Result<IntersectionGraph> {
    let dim = bodies.first().map_or(2, ConvexBody::dim);
    let index = build_index_from_bodies(bodies.iter(), dim);
    let refs: Vec<&ConvexBody> = bodies.iter().collect();
    graph_over(&refs, &index, tol)
}

fn graph_over(
    bodies: &[&ConvexBody],
    index: &LayeredGrid,
    tol: f64,
) -> Result<IntersectionGraph> {
    if index.len() != bodies.len() {
        return Err(Error::invalid(format!(
            "index holds {} points, configuration {}",
            index.len(),
            bodies.len()
        )));
    }
    // Each unordered pair is decided once, from its smaller id.
    let upper: Vec<Vec<usize>> = (0..bodies.len())
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in index.query_candidates(bodies[i]) {
                if j <= i {
                    continue;
                }
                let hit = intersects(bodies[i], bodies[j], tol).map_err(|e| Error::Pair {
                    a: i,
                    b: j,
                    source: Box::new(e),
                })?;
                if hit {
                    out.push(j);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut adj = upper.clone();
    for (i, l) in upper.iter().enumerate() {
        for &j in l {
            adj[j].push(i);
        }
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    Ok(IntersectionGraph { adj })
}

/// Breadth-first distances from `source`; `None` marks unreachable vertices.
pub fn bfs_distances(graph: &IntersectionGraph, source: usize) -> Result<Vec<Option<usize>>> {
    if source >= graph.len() {
        return Err(Error::InvalidId(source));
    }
    let mut dist = vec![None; graph.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].unwrap_or(0);
        for &w in graph.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(dv + 1);
                queue.push_back(w);
            }
        }
    }
    Ok(dist)
}

/// Number of edges on a shortest path from `a` to `b`, or `None` if they are not
/// connected.
pub fn chemical_distance(graph: &IntersectionGraph, a: usize, b: usize) -> Result<Option<usize>> {
    if a >= graph.len() {
        return Err(Error::InvalidId(a));
    }
    if b >= graph.len() {
        return Err(Error::InvalidId(b));
    }
    if a == b {
        return Ok(Some(0));
    }
    let mut dist = vec![usize::MAX; graph.len()];
    dist[a] = 0;
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        for &w in graph.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                if w == b {
                    return Ok(Some(dist[w]));
                }
                queue.push_back(w);
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentLabels {
    /// Component of each vertex; components are numbered by their smallest vertex.
    pub labels: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl ComponentLabels {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn size_of(&self, v: usize) -> usize {
        self.sizes[self.labels[v]]
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components by union-find.
pub fn components(graph: &IntersectionGraph) -> ComponentLabels {
    let n = graph.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut rank = vec![0u8; n];
    for (i, j) in graph.edges() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a == b {
            continue;
        }
        match rank[a].cmp(&rank[b]) {
            std::cmp::Ordering::Less => parent[a] = b,
            std::cmp::Ordering::Greater => parent[b] = a,
            std::cmp::Ordering::Equal => {
                parent[b] = a;
                rank[a] += 1;
            }
        }
    }
    let mut label_of_root = vec![usize::MAX; n];
    let mut labels = Vec::with_capacity(n);
    let mut sizes = Vec::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        if label_of_root[r] == usize::MAX {
            label_of_root[r] = sizes.len();
            sizes.push(0);
        }
        labels.push(label_of_root[r]);
        sizes[label_of_root[r]] += 1;
    }
    ComponentLabels { labels, sizes }
}

/// Whether the component of `start` contains a grain that meets the boundary of the
/// window, i.e. is not contained in its interior.
pub fn reaches_boundary(
    config: &Configuration,
    graph: &IntersectionGraph,
    start: usize,
) -> Result<bool> {
    let dist = bfs_distances(graph, start)?;
    Ok(dist
        .iter()
        .zip(&config.points)
        .any(|(d, p)| d.is_some() && config.window.body_reaches_boundary(&p.grain)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub u: f64,
    pub theta: f64,
    pub stderr: f64,
    pub hits: usize,
    pub replicas: usize,
}

impl ThetaEstimate {
    pub fn from_hits(u: f64, hits: usize, replicas: usize) -> Self {
        let theta = if replicas == 0 { 0.0 } else { hits as f64 / replicas as f64 };
        ThetaEstimate {
            u,
            theta,
            stderr: (theta * (1.0 - theta) / replicas.max(1) as f64).sqrt(),
            hits,
            replicas,
        }
    }
}

fn check_grid(u_grid: &[f64]) -> Result<()> {
    if u_grid.is_empty() {
        return Err(Error::invalid("intensity grid is empty"));
    }
    if u_grid.iter().any(|&u| !(u >= 0.0 && u.is_finite())) {
        return Err(Error::invalid("intensities must be nonnegative and finite"));
    }
    if u_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("intensity grid must be nondecreasing"));
    }
    Ok(())
}

/// Boundary-reaching indicator of the Palm point at the window center for every
/// intensity of `u_grid`, on one realization coupled by superposition: the points
/// present at `u_grid[k]` are those at `u_grid[k-1]` plus an independent layer.
pub fn coupled_theta_indicators(
    window: &Window,
    u_grid: &[f64],
    family: &GrainFamily,
    trunc: &TruncationPolicy,
    rng: SeededRng,
) -> Result<Vec<bool>> {
    check_grid(u_grid)?;
    let increments: Vec<f64> = u_grid
        .iter()
        .scan(0.0, |prev, &u| {
            let inc = u - *prev;
            *prev = u;
            Some(inc)
        })
        .collect();
    let center = window.center();
    if trunc.cap.is_some() {
        // Lazy realization restricted to the enlarged window: only the cluster of the
        // center is ever generated.
        let region = window.inflate(trunc.margin(family));
        let mut lazy =
            LazyProcess::new(family, *trunc, increments, rng, Some(region), DEFAULT_TOL)?;
        let palm = lazy.add_palm(center)?;
        (0..u_grid.len())
            .map(|level| {
                lazy_reaches_boundary(&mut lazy, palm, window, level, usize::MAX)
                    .map(|r| r.unwrap_or(true))
            })
            .collect()
    } else {
        let config =
            sample_layered_configuration(window, &increments, family, trunc, &[center], rng)?;
        (0..u_grid.len())
            .map(|level| {
                let sub = config.restricted_to_layer(level);
                let graph = build_graph(&sub, &build_index(&sub))?;
                let palm = sub.len() - 1;
                reaches_boundary(&sub, &graph, palm)
            })
            .collect()
    }
}

/// Per-replica indicators of a coupled scan; replica `r` runs on `rng.child(r)`.
pub fn theta_scan_indicators(
    window: &Window,
    u_grid: &[f64],
    family: &GrainFamily,
    trunc: &TruncationPolicy,
    replicas: usize,
    rng: SeededRng,
) -> Result<Vec<Vec<bool>>> {
    if replicas == 0 {
        return Err(Error::invalid("need at least one replica"));
    }
    (0..replicas)
        .into_par_iter()
        .map(|r| coupled_theta_indicators(window, u_grid, family, trunc, rng.child(r as u64)))
        .collect()
}

/// Finite-window estimate of the percolation probability at intensity `u`.
pub fn theta_hat(
    window: &Window,
    u: f64,
    family: &GrainFamily,
    trunc: &TruncationPolicy,
    replicas: usize,
    rng: SeededRng,
) -> Result<ThetaEstimate> {
    let ind = theta_scan_indicators(window, &[u], family, trunc, replicas, rng)?;
    let hits = ind.iter().filter(|v| v[0]).count();
    Ok(ThetaEstimate::from_hits(u, hits, replicas))
}

/// Estimates along a coupled scan.
pub fn theta_scan(
    window: &Window,
    u_grid: &[f64],
    family: &GrainFamily,
    trunc: &TruncationPolicy,
    replicas: usize,
    rng: SeededRng,
) -> Result<Vec<ThetaEstimate>> {
    let ind = theta_scan_indicators(window, u_grid, family, trunc, replicas, rng)?;
    Ok(u_grid
        .iter()
        .enumerate()
        .map(|(k, &u)| ThetaEstimate::from_hits(u, ind.iter().filter(|v| v[k]).count(), replicas))
        .collect())
}

/// Locations of the two Palm points of a distance experiment.
pub fn palm_pair(center: &Vector, separation: f64) -> [Vector; 2] {
    let mut far = *center;
    far[0] += separation;
    [*center, far]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(x: f64, r: f64) -> ConvexBody {
        ConvexBody::ball(Vector::from_slice(&[x, 0.0]), r).unwrap()
    }

    #[test]
    fn chain_of_three() {
        let g = graph_from_bodies(&[ball(0.0, 1.0), ball(1.5, 1.0), ball(3.0, 1.0)], DEFAULT_TOL)
            .unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(chemical_distance(&g, 0, 2).unwrap(), Some(2));
        assert_eq!(chemical_distance(&g, 1, 1).unwrap(), Some(0));
        let c = components(&g);
        assert_eq!(c.sizes, vec![3]);
        assert!(chemical_distance(&g, 0, 7).is_err());
    }

    #[test]
    fn empty_graph() {
        let g = graph_from_bodies(&[], DEFAULT_TOL).unwrap();
        assert!(g.is_empty());
        assert_eq!(components(&g).count(), 0);
    }

    #[test]
    fn two_big_palm_grains_share_an_edge() {
        let g = graph_from_bodies(&[ball(0.0, 5.0), ball(1.0, 5.0)], DEFAULT_TOL).unwrap();
        assert_eq!(g.edge_count(), 1);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1\n");
    }

    #[test]
    fn separate_components() {
        let g = graph_from_bodies(&[ball(0.0, 1.0), ball(10.0, 1.0), ball(1.0, 1.0)], DEFAULT_TOL)
            .unwrap();
        let c = components(&g);
        assert_eq!(c.labels, vec![0, 1, 0]);
        assert_eq!(c.size_of(2), 2);
        assert_eq!(chemical_distance(&g, 0, 1).unwrap(), None);
    }
}
