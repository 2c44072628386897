//! Local refinement operators that open a private corridor for one bundle
//! around a merging vertex.

use serde::{Deserialize, Serialize};

use super::DetachError;
use crate::geom::{self, Vec3};
use crate::mesh::{Fan, TriMesh};

/// Halvings of λ tried before a vertex split placement is declared failed.
pub const MAX_HALVINGS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    EdgeSplit,
    VertexSplit,
    TriangleSplit,
}

/// One executed operator with the mesh growth it caused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpRecord {
    pub kind: OpKind,
    pub vertex: usize,
    /// Interior edges of the fan used (`|E|`).
    pub fan_edges: usize,
    pub added_vertices: usize,
    pub added_triangles: usize,
}

/// Maximum angle, in degrees, between the normals of any two triangles of
/// the fan.
pub fn fan_planarity(mesh: &TriMesh, fan: &Fan) -> Result<f64, DetachError> {
    let normals: Vec<Vec3> = fan
        .triangles
        .iter()
        .map(|&t| {
            let n = mesh.triangle_cross(t);
            if geom::norm(n) == 0.0 {
                Err(DetachError::DegenerateFan { triangle: t })
            } else {
                Ok(n)
            }
        })
        .collect::<Result<_, _>>()?;
    let mut max = 0.0f64;
    for i in 0..normals.len() {
        for j in i + 1..normals.len() {
            max = max.max(geom::angle_between(normals[i], normals[j]));
        }
    }
    Ok(max.to_degrees())
}

/// Accepted position for the copy of a split vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Placement {
    pub position: Vec3,
    pub lambda: f64,
    pub halvings: usize,
}

/// The vertex the split copy moves towards: the far end of the median spoke,
/// or the midpoint of the opposite edge for a single-triangle fan.
pub fn split_target(mesh: &TriMesh, fan: &Fan) -> Vec3 {
    if fan.spokes.is_empty() {
        geom::midpoint(mesh.position(fan.from), mesh.position(fan.to))
    } else {
        mesh.position(fan.spokes[fan.spokes.len() / 2])
    }
}

/// Whether placing the split copy of `fan.center` at `pos` keeps every
/// triangle around the copy facing the same way as the original fan.
pub fn placement_is_valid(mesh: &TriMesh, fan: &Fan, pos: Vec3) -> bool {
    let w = fan.center;
    let mut reference = [0.0; 3];
    for &t in &fan.triangles {
        reference = geom::add(reference, mesh.triangle_cross(t));
    }
    let p = |v: usize| if v == w { pos } else { mesh.position(v) };
    let ok = |a: Vec3, b: Vec3, c: Vec3| geom::dot(geom::triangle_cross(a, b, c), reference) > 0.0;
    for &t in &fan.triangles {
        let [a, b, c] = mesh.triangle(t);
        if !ok(p(a), p(b), p(c)) {
            return false;
        }
    }
    let (first, last) = fan.ccw_bounds();
    let wp = mesh.position(w);
    ok(wp, mesh.position(first), pos) && ok(wp, pos, mesh.position(last))
}

/// Targets tried in order: the median spoke's far end first, then the other
/// spokes and the fan triangles' centroids, nearest to the middle of the fan
/// first. Only the first one is needed on planar fans whose median lies
/// inside the wedge; the rest cover wedges where it does not.
pub fn split_targets(mesh: &TriMesh, fan: &Fan) -> Vec<Vec3> {
    let mut out = vec![split_target(mesh, fan)];
    let n = fan.spokes.len();
    let mut spokes: Vec<usize> = (0..n).filter(|&i| i != n / 2).collect();
    spokes.sort_by_key(|&i| (i as isize - (n / 2) as isize).unsigned_abs());
    out.extend(spokes.into_iter().map(|i| mesh.position(fan.spokes[i])));
    let m = fan.triangles.len();
    let mut tris: Vec<usize> = (0..m).collect();
    tris.sort_by_key(|&i| (2 * i as isize - (m as isize - 1)).unsigned_abs());
    out.extend(tris.into_iter().map(|i| {
        let [a, b, c] = mesh.triangle_positions(fan.triangles[i]);
        geom::scale(geom::add(geom::add(a, b), c), 1.0 / 3.0)
    }));
    out
}

/// `v' = (1 − λ) v + λ v_e`, halving λ until no triangle flips.
pub fn place_split_vertex(mesh: &TriMesh, fan: &Fan, lambda_init: f64) -> Result<Placement, DetachError> {
    if fan.from == fan.to {
        return Err(DetachError::SameEdges(fan.center));
    }
    let w = mesh.position(fan.center);
    for target in split_targets(mesh, fan) {
        let mut lambda = lambda_init;
        for halvings in 0..=MAX_HALVINGS {
            let position = geom::lerp(w, target, lambda);
            if placement_is_valid(mesh, fan, position) {
                return Ok(Placement { position, lambda, halvings });
            }
            lambda *= 0.5;
        }
    }
    Err(DetachError::PlacementFailed { vertex: fan.center })
}

/// Splits every interior spoke of `fan` at its midpoint. Returns the new
/// vertices ordered from `fan.from` to `fan.to`.
pub(crate) fn edge_split_fan(mesh: &mut TriMesh, fan: &Fan) -> Result<Vec<usize>, DetachError> {
    if fan.spokes.is_empty() {
        return Err(DetachError::EmptyEdgeFan(fan.center));
    }
    let w = fan.center;
    let mut corridor = Vec::with_capacity(fan.spokes.len());
    for &s in &fan.spokes {
        let mid = geom::midpoint(mesh.position(w), mesh.position(s));
        corridor.push(mesh.split_edge(w, s, mid)?);
    }
    Ok(corridor)
}

/// Splits the fan's center towards `placement`. Returns the new vertex.
pub(crate) fn vertex_split_fan(mesh: &mut TriMesh, fan: &Fan, position: Vec3) -> usize {
    mesh.split_vertex(fan, position)
}

/// Inserts the barycenter of the fan's only triangle.
pub(crate) fn triangle_split_fan(mesh: &mut TriMesh, fan: &Fan) -> Result<usize, DetachError> {
    if fan.triangles.len() != 1 {
        return Err(DetachError::NotSingleTriangle(fan.center));
    }
    let t = fan.triangles[0];
    let [a, b, c] = mesh.triangle_positions(t);
    let bary = geom::scale(geom::add(geom::add(a, b), c), 1.0 / 3.0);
    Ok(mesh.split_triangle(t, bary))
}
