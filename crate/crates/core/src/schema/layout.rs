//! Tutte embedding of a cut disk onto the regular `4g`-gon.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::locate::PointGrid;
use super::{CutMesh, LoopCopy, SchemaError};
use crate::geom::{self, Vec2, Vec3};
use crate::mesh::{self as io, EdgeRef, TriMesh};

/// Where a layout vertex comes from on the closed (refined) mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Vertex(usize),
    /// Midpoint inserted to break an interior edge whose endpoints lie on the
    /// same polygon side.
    EdgeMidpoint(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryVertex {
    pub vertex: usize,
    pub side: usize,
    pub loop_index: usize,
    pub copy: LoopCopy,
    /// Arc-length parameter along the side, 0 at its first corner.
    pub t: f64,
}

/// A disk embedded in the unit circle with its boundary on the regular
/// `4g`-gon.
#[derive(Clone, Debug)]
pub struct SchemaLayout {
    pub genus: usize,
    pub origin: usize,
    pub uv: Vec<Vec2>,
    /// Surface position of each layout vertex.
    pub points: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    pub provenance: Vec<Provenance>,
    /// Cut-mesh triangle containing each layout triangle.
    pub parent: Vec<usize>,
    /// Boundary in CCW order starting at corner 0; every corner is listed
    /// once, as the start of its side.
    pub boundary: Vec<BoundaryVertex>,
    /// Layout vertex at each polygon corner.
    pub corners: Vec<usize>,
    grid: PointGrid,
}

/// Corner `j` of the regular `n`-gon inscribed in the unit circle.
pub fn polygon_corner(sides: usize, j: usize) -> Vec2 {
    let a = 2.0 * std::f64::consts::PI * (j % sides) as f64 / sides as f64;
    [a.cos(), a.sin()]
}

/// Area of the regular `n`-gon inscribed in the unit circle.
pub fn polygon_area(sides: usize) -> f64 {
    0.5 * sides as f64 * (2.0 * std::f64::consts::PI / sides as f64).sin()
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    genus: usize,
    origin: usize,
    provenance: Vec<Provenance>,
    points: Vec<Vec3>,
    parent: Vec<usize>,
    corners: Vec<usize>,
    boundary: Vec<BoundaryVertex>,
}

impl SchemaLayout {
    pub fn sides(&self) -> usize {
        4 * self.genus
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        geom::signed_area_2d(self.uv[a], self.uv[b], self.uv[c])
    }

    /// Triangles whose 2D image is not strictly positively oriented.
    pub fn flipped_triangles(&self) -> usize {
        (0..self.triangles.len()).filter(|&t| self.signed_area(t) <= 0.0).count()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.signed_area(t)).sum()
    }

    pub fn point_2d(&self, t: usize, bary: [f64; 3]) -> Vec2 {
        let [a, b, c] = self.triangles[t];
        let mut p = [0.0; 2];
        for (w, v) in bary.iter().zip([a, b, c]) {
            p[0] += w * self.uv[v][0];
            p[1] += w * self.uv[v][1];
        }
        p
    }

    pub fn point_3d(&self, t: usize, bary: [f64; 3]) -> Vec3 {
        let [a, b, c] = self.triangles[t];
        let mut p = [0.0; 3];
        for (w, v) in bary.iter().zip([a, b, c]) {
            p = geom::add(p, geom::scale(self.points[v], *w));
        }
        p
    }

    pub fn grid(&self) -> &PointGrid {
        &self.grid
    }

    /// Writes the 2D layout as OBJ (z = 0) and the provenance sidecar JSON.
    pub fn save(&self, obj: impl AsRef<Path>, sidecar: impl AsRef<Path>) -> Result<(), SchemaError> {
        let pos: Vec<Vec3> = self.uv.iter().map(|p| [p[0], p[1], 0.0]).collect();
        fs::write(obj, io::write_obj(&pos, &self.triangles))?;
        let side = Sidecar {
            genus: self.genus,
            origin: self.origin,
            provenance: self.provenance.clone(),
            points: self.points.clone(),
            parent: self.parent.clone(),
            corners: self.corners.clone(),
            boundary: self.boundary.clone(),
        };
        fs::write(sidecar, serde_json::to_string_pretty(&side)?)?;
        Ok(())
    }

    pub fn load(obj: impl AsRef<Path>, sidecar: impl AsRef<Path>) -> Result<Self, SchemaError> {
        let (pos, triangles) = io::parse_obj(&fs::read_to_string(obj)?)?;
        let side: Sidecar = serde_json::from_str(&fs::read_to_string(sidecar)?)?;
        let n = pos.len();
        if side.provenance.len() != n || side.points.len() != n || side.parent.len() != triangles.len() {
            return Err(SchemaError::Format("sidecar does not match the OBJ".into()));
        }
        if side.genus == 0 || side.corners.len() != 4 * side.genus {
            return Err(SchemaError::Format(format!("{} corners for genus {}", side.corners.len(), side.genus)));
        }
        if triangles.iter().flatten().chain(&side.corners).any(|&v| v >= n) {
            return Err(SchemaError::Format("vertex index out of range".into()));
        }
        let uv: Vec<Vec2> = pos.iter().map(|p| [p[0], p[1]]).collect();
        let grid = PointGrid::new(&uv, &triangles);
        Ok(SchemaLayout {
            genus: side.genus,
            origin: side.origin,
            uv,
            points: side.points,
            triangles,
            provenance: side.provenance,
            parent: side.parent,
            boundary: side.boundary,
            corners: side.corners,
            grid,
        })
    }
}

/// Maps the boundary of `cut` onto the regular `4g`-gon by arc length and
/// places interior vertices at the average of their neighbours.
///
/// Interior edges joining two vertices of the same polygon side are split at
/// their midpoints first; otherwise their triangles would collapse onto the
/// side.
pub fn layout_canonical(cut: &CutMesh) -> Result<SchemaLayout, SchemaError> {
    let sides = 4 * cut.genus;
    let mut mesh = TriMesh::new_unchecked(cut.disk.positions().to_vec(), cut.disk.triangles().to_vec())?;
    let mut provenance: Vec<Provenance> = cut.source.iter().map(|&s| Provenance::Vertex(s)).collect();
    let mut parent: Vec<usize> = (0..mesh.num_triangles()).collect();

    let nb = cut.boundary.len();
    let mut on_side: HashMap<usize, [usize; 2]> = HashMap::with_capacity(nb);
    for (j, a) in cut.arcs.iter().enumerate() {
        for i in 0..=a.len {
            let v = cut.boundary[(a.start + i) % nb];
            let e = on_side.entry(v).or_insert([j, j]);
            if i == 0 {
                // corner: also ends the previous side
                *e = [j, (j + sides - 1) % sides];
            }
        }
    }
    let shares_side = |a: usize, b: usize| match (on_side.get(&a), on_side.get(&b)) {
        (Some(x), Some(y)) => x.iter().any(|s| y.contains(s)),
        _ => false,
    };
    let chords: Vec<EdgeRef> = mesh
        .edges()
        .into_iter()
        .filter(|e| {
            let (a, b) = e.endpoints();
            mesh.edge_triangles(a, b).len() == 2 && shares_side(a, b)
        })
        .collect();
    for e in chords {
        let (a, b) = e.endpoints();
        let tris = mesh.edge_triangles(a, b);
        let before = mesh.num_triangles();
        let mid = geom::midpoint(mesh.position(a), mesh.position(b));
        mesh.split_edge(a, b, mid)?;
        let src = |v: usize| match provenance[v] {
            Provenance::Vertex(s) => s,
            Provenance::EdgeMidpoint(..) => unreachable!("chord endpoints are boundary vertices"),
        };
        provenance.push(Provenance::EdgeMidpoint(src(a), src(b)));
        for (k, &t) in tris.iter().enumerate() {
            debug_assert_eq!(before + k, parent.len());
            parent.push(parent[t]);
        }
    }

    let n = mesh.num_vertices();
    let mut uv = vec![[0.0; 2]; n];
    let mut fixed = vec![false; n];
    let mut boundary = Vec::with_capacity(nb);
    let mut corners = Vec::with_capacity(sides);
    for (j, a) in cut.arcs.iter().enumerate() {
        let verts = cut.arc_vertices(j);
        let mut s = vec![0.0];
        for w in verts.windows(2) {
            s.push(s.last().unwrap() + mesh.edge_length(w[0], w[1]));
        }
        let total = *s.last().unwrap();
        let (p0, p1) = (polygon_corner(sides, j), polygon_corner(sides, j + 1));
        corners.push(verts[0]);
        for (i, &v) in verts[..verts.len() - 1].iter().enumerate() {
            let t = s[i] / total;
            uv[v] = if i == 0 { p0 } else { [p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])] };
            fixed[v] = true;
            boundary.push(BoundaryVertex { vertex: v, side: j, loop_index: a.loop_index, copy: a.copy, t });
        }
    }

    solve_interior(&mesh, &mut uv, &fixed)?;
    let points = mesh.positions().to_vec();
    let triangles = mesh.triangles().to_vec();
    let grid = PointGrid::new(&uv, &triangles);
    Ok(SchemaLayout { genus: cut.genus, origin: cut.origin, uv, points, triangles, provenance, parent, boundary, corners, grid })
}

/// Uniform-weight Laplace solve for the free vertices by Jacobi-preconditioned
/// conjugate gradients, one coordinate at a time.
fn solve_interior(mesh: &TriMesh, uv: &mut [Vec2], fixed: &[bool]) -> Result<(), SchemaError> {
    let n = mesh.num_vertices();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in mesh.edges() {
        let (a, b) = e.endpoints();
        adj[a].push(b);
        adj[b].push(a);
    }
    let free: Vec<usize> = (0..n).filter(|&v| !fixed[v]).collect();
    if free.is_empty() {
        return Ok(());
    }
    let mut index = vec![usize::MAX; n];
    for (i, &v) in free.iter().enumerate() {
        index[v] = i;
    }
    let m = free.len();
    let diag: Vec<f64> = free.iter().map(|&v| adj[v].len() as f64).collect();
    let apply = |x: &[f64], y: &mut [f64]| {
        for (i, &v) in free.iter().enumerate() {
            let mut s = diag[i] * x[i];
            for &w in &adj[v] {
                if index[w] != usize::MAX {
                    s -= x[index[w]];
                }
            }
            y[i] = s;
        }
    };
    for c in 0..2 {
        let rhs: Vec<f64> = free
            .iter()
            .map(|&v| adj[v].iter().filter(|&&w| fixed[w]).map(|&w| uv[w][c]).sum())
            .collect();
        let bnorm = rhs.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut x = vec![0.0; m];
        let mut r = rhs.clone();
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; m];
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let tol = 1e-13 * bnorm.max(1e-300);
        let mut res = bnorm;
        for _ in 0..(4 * m + 1000) {
            if res <= tol {
                break;
            }
            apply(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                return Err(SchemaError::Singular(res));
            }
            let alpha = rz / pap;
            for i in 0..m {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            res = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            for i in 0..m {
                z[i] = r[i] / diag[i];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..m {
                p[i] = z[i] + beta * p[i];
            }
        }
        if !(res <= 1e-10 * bnorm.max(1.0)) {
            return Err(SchemaError::Singular(res));
        }
        for (i, &v) in free.iter().enumerate() {
            uv[v][c] = x[i];
        }
    }
    Ok(())
}
