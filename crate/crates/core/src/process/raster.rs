//! Conservative rasterization of oriented boxes onto axis-aligned grids.

use crate::geometry::{Obb, Vector, MAX_DIM};

pub(crate) type Cell = [i64; MAX_DIM];

/// True when no face normal of either box separates the cell block `[lo, hi]` (in
/// world units) from `obb`. Exact in two dimensions, conservative above.
fn may_overlap(obb: &Obb, axes: &[Vector], lo: &Vector, hi: &Vector) -> bool {
    let d = lo.dim();
    let bc = (*lo + *hi) * 0.5;
    let bh = (*hi - *lo) * 0.5;
    // World axes, using the box's axis-aligned extent.
    for k in 0..d {
        let ext: f64 = (0..d).map(|i| obb.half[i] * axes[i][k].abs()).sum();
        if (obb.center[k] - bc[k]).abs() > ext + bh[k] {
            return false;
        }
    }
    for (i, u) in axes.iter().enumerate() {
        let r_block: f64 = (0..d).map(|k| bh[k] * u[k].abs()).sum();
        if (obb.center - bc).dot(u).abs() > obb.half[i] + r_block {
            return false;
        }
    }
    true
}

/// All grid cells of side `side` that may meet `obb` (every cell that does is
/// included). Cells are integer coordinates; cell `c` covers `[c*side, (c+1)*side)`.
pub(crate) fn rasterize(obb: &Obb, side: f64, out: &mut Vec<Cell>) {
    let d = obb.center.dim();
    let axes: Vec<Vector> = (0..d).map(|i| obb.rotation.column(i)).collect();
    let mut lo = [0i64; MAX_DIM];
    let mut hi = [0i64; MAX_DIM];
    for k in 0..d {
        let ext: f64 = (0..d).map(|i| obb.half[i] * axes[i][k].abs()).sum();
        lo[k] = ((obb.center[k] - ext) / side).floor() as i64;
        hi[k] = ((obb.center[k] + ext) / side).floor() as i64;
    }
    recurse(obb, &axes, side, d, lo, hi, out);
}

fn recurse(
    obb: &Obb,
    axes: &[Vector],
    side: f64,
    d: usize,
    lo: Cell,
    hi: Cell,
    out: &mut Vec<Cell>,
) {
    let mut wlo = Vector::zeros(d);
    let mut whi = Vector::zeros(d);
    for k in 0..d {
        wlo[k] = lo[k] as f64 * side;
        whi[k] = (hi[k] + 1) as f64 * side;
    }
    if !may_overlap(obb, axes, &wlo, &whi) {
        return;
    }
    if (0..d).all(|k| lo[k] == hi[k]) {
        out.push(lo);
        return;
    }
    // Split every axis with more than one cell at its midpoint.
    let mut splits = [(0i64, 0i64, 0i64, 0i64); MAX_DIM];
    for k in 0..d {
        if hi[k] > lo[k] {
            let mid = lo[k] + (hi[k] - lo[k]) / 2;
            splits[k] = (lo[k], mid, mid + 1, hi[k]);
        } else {
            splits[k] = (lo[k], hi[k], 1, 0);
        }
    }
    for mask in 0..1usize << d {
        let mut clo = lo;
        let mut chi = hi;
        let mut empty = false;
        for k in 0..d {
            let (a, b, c, e) = splits[k];
            if mask & (1 << k) == 0 {
                clo[k] = a;
                chi[k] = b;
            } else {
                if c > e {
                    empty = true;
                    break;
                }
                clo[k] = c;
                chi[k] = e;
            }
        }
        if !empty {
            recurse(obb, axes, side, d, clo, chi, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexBody, Rotation};

    #[test]
    fn diagonal_rod_covers_its_points() {
        let rod = ConvexBody::oriented_box(
            Vector::from_slice(&[50.0, 0.5]),
            Vector::from_slice(&[3.0, -7.0]),
            Rotation::planar(0.7),
        )
        .unwrap();
        let mut cells = Vec::new();
        rasterize(&rod.obb(), 2.0, &mut cells);
        // Far fewer cells than the bounding box would need.
        assert!(cells.len() < 200, "{}", cells.len());
        for t in 0..=1000 {
            let s = -1.0 + 2.0 * t as f64 / 1000.0;
            let p = rod.to_world(&Vector::from_slice(&[50.0 * s, 0.5 * s]));
            let c = [(p[0] / 2.0).floor() as i64, (p[1] / 2.0).floor() as i64, 0, 0];
            assert!(cells.contains(&c));
        }
    }
}
