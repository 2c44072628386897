//! Point location in a 2D layout and mapping points between two schemas.

use super::{SchemaError, SchemaLayout};
use crate::geom::{self, Vec2};

/// Barycentric slack accepted for points on triangle edges and on the
/// polygon boundary.
pub const SNAP_EPS: f64 = 1e-12;

/// Uniform grid over the bounding box of a 2D triangulation; each cell lists
/// the triangles whose bounding box overlaps it.
#[derive(Clone, Debug, Default)]
pub struct PointGrid {
    min: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
    uv: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
}

fn barycentric(p: Vec2, a: Vec2, b: Vec2, c: Vec2) -> [f64; 3] {
    let area = geom::signed_area_2d(a, b, c);
    let wa = geom::signed_area_2d(p, b, c) / area;
    let wb = geom::signed_area_2d(a, p, c) / area;
    [wa, wb, 1.0 - wa - wb]
}

impl PointGrid {
    pub fn new(uv: &[Vec2], triangles: &[[usize; 3]]) -> Self {
        if triangles.is_empty() {
            return PointGrid::default();
        }
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in uv {
            for k in 0..2 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        let extent = (max[0] - min[0]).max(max[1] - min[1]).max(f64::MIN_POSITIVE);
        let per_axis = ((triangles.len() as f64).sqrt().ceil() as usize).clamp(1, 2048);
        let cell = extent / per_axis as f64;
        let nx = (((max[0] - min[0]) / cell).floor() as usize + 1).max(1);
        let ny = (((max[1] - min[1]) / cell).floor() as usize + 1).max(1);
        let mut grid = PointGrid { min, cell, nx, ny, cells: vec![Vec::new(); nx * ny], uv: uv.to_vec(), triangles: triangles.to_vec() };
        for (t, tri) in triangles.iter().enumerate() {
            let mut lo = [f64::INFINITY; 2];
            let mut hi = [f64::NEG_INFINITY; 2];
            for &v in tri {
                for k in 0..2 {
                    lo[k] = lo[k].min(uv[v][k]);
                    hi[k] = hi[k].max(uv[v][k]);
                }
            }
            let (x0, y0) = grid.cell_of([lo[0] - SNAP_EPS, lo[1] - SNAP_EPS]);
            let (x1, y1) = grid.cell_of([hi[0] + SNAP_EPS, hi[1] + SNAP_EPS]);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    grid.cells[y * nx + x].push(t as u32);
                }
            }
        }
        grid
    }

    fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let f = |v: f64, m: f64, n: usize| (((v - m) / self.cell).floor().max(0.0) as usize).min(n - 1);
        (f(p[0], self.min[0], self.nx), f(p[1], self.min[1], self.ny))
    }

    fn bary(&self, t: usize, p: Vec2) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        barycentric(p, self.uv[a], self.uv[b], self.uv[c])
    }

    fn best_of(&self, p: Vec2, tris: impl Iterator<Item = usize>) -> Option<(usize, [f64; 3], f64)> {
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for t in tris {
            let w = self.bary(t, p);
            let m = w[0].min(w[1]).min(w[2]);
            if m.is_finite() && best.is_none_or(|b| m > b.2) {
                best = Some((t, w, m));
            }
        }
        best
    }

    /// Triangle containing `p` with its barycentric coordinates. Points
    /// within [`SNAP_EPS`] of the triangulation snap onto it.
    pub fn locate(&self, p: Vec2) -> Option<(usize, [f64; 3])> {
        if self.triangles.is_empty() {
            return None;
        }
        let (x, y) = self.cell_of(p);
        let found = self
            .best_of(p, self.cells[y * self.nx + x].iter().map(|&t| t as usize))
            .filter(|b| b.2 >= -SNAP_EPS)
            .or_else(|| self.best_of(p, 0..self.triangles.len()).filter(|b| b.2 >= -SNAP_EPS));
        found.map(|(t, w, m)| {
            if m >= 0.0 {
                return (t, w);
            }
            let c = w.map(|x| x.max(0.0));
            let s = c[0] + c[1] + c[2];
            (t, c.map(|x| x / s))
        })
    }
}

/// Maps a point of layout `a`, given as a triangle and barycentric
/// coordinates, to layout `b` rotated by `k` polygon sides.
///
/// With `k' = (4g - k) mod 4g`, mapping back from `b` to `a` with `k'`
/// returns the original point.
pub fn map_point(
    a: &SchemaLayout,
    b: &SchemaLayout,
    point: (usize, [f64; 3]),
    k: i64,
) -> Result<(usize, [f64; 3]), SchemaError> {
    if a.genus != b.genus {
        return Err(SchemaError::GenusMismatch(a.genus, b.genus));
    }
    let (t, bary) = point;
    if t >= a.triangles.len() {
        return Err(SchemaError::TriangleOutOfRange(t));
    }
    let sides = a.sides() as i64;
    let k = k.rem_euclid(sides);
    let p = a.point_2d(t, bary);
    let q = if k == 0 {
        p
    } else {
        let th = -2.0 * std::f64::consts::PI * k as f64 / sides as f64;
        let (s, c) = th.sin_cos();
        [c * p[0] - s * p[1], s * p[0] + c * p[1]]
    };
    b.grid().locate(q).ok_or(SchemaError::OutsidePolygon(q[0], q[1]))
}
