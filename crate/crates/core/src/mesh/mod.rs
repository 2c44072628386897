//! Indexed triangle mesh with vertex→triangle adjacency.
//!
//! Triangles are stored as counter-clockwise vertex triples (seen from
//! outside). All other adjacency (edge→triangles, cyclic one-rings, fans) is
//! derived on demand from the vertex→triangle lists, which the split
//! operators keep up to date incrementally.

mod io;

pub use io::{load_mesh, parse_obj, parse_off, save_mesh, write_obj, write_off, MeshFormat};

use std::collections::HashMap;

use thiserror::Error;

use crate::geom::{self, Vec3};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported mesh format for path {0:?}")]
    UnknownFormat(String),
    #[error("mesh has no triangles")]
    Empty,
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("triangle {0} references a vertex out of range")]
    IndexOutOfRange(usize),
    #[error("triangle {0} repeats a vertex")]
    DegenerateTriangle(usize),
    #[error("edge ({0}, {1}) has zero length")]
    ZeroLengthEdge(usize, usize),
    #[error("edge ({a}, {b}) is shared by {count} triangles (first: triangle {tri})")]
    NonManifoldEdge { a: usize, b: usize, count: usize, tri: usize },
    #[error("edge ({0}, {1}) is a boundary edge (triangle {2})")]
    BoundaryEdge(usize, usize, usize),
    #[error("inconsistent orientation at edge ({0}, {1}) (triangle {2})")]
    InconsistentOrientation(usize, usize, usize),
    #[error("vertex {0} is a pinch point (one-ring is not a single cycle)")]
    NonManifoldVertex(usize),
    #[error("vertex {0} is not referenced by any triangle")]
    IsolatedVertex(usize),
    #[error("mesh is not connected")]
    Disconnected,
    #[error("odd Euler characteristic {0}")]
    OddEulerCharacteristic(i64),
    #[error("edge ({0}, {1}) does not exist")]
    NoSuchEdge(usize, usize),
    #[error("edge ({0}, {1}) is not incident to vertex {2}")]
    NotIncident(usize, usize, usize),
}

pub type Result<T, E = MeshError> = std::result::Result<T, E>;

/// Unordered vertex pair naming a mesh edge. Endpoints are kept sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    a: usize,
    b: usize,
}

impl EdgeRef {
    /// Panics if `a == b`.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "edge endpoints must be distinct");
        if a < b {
            EdgeRef { a, b }
        } else {
            EdgeRef { a: b, b: a }
        }
    }

    pub fn endpoints(self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn contains(self, v: usize) -> bool {
        self.a == v || self.b == v
    }

    /// The endpoint that is not `v`, if `v` is an endpoint.
    pub fn other(self, v: usize) -> Option<usize> {
        if self.a == v {
            Some(self.b)
        } else if self.b == v {
            Some(self.a)
        } else {
            None
        }
    }
}

/// Rotational direction around a vertex, as seen from outside the surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Rotation {
    Cw,
    Ccw,
}

/// The triangles and interior spokes swept when rotating around `center`
/// from one incident edge to another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    pub center: usize,
    /// Far endpoint of the starting edge.
    pub from: usize,
    /// Far endpoint of the final edge.
    pub to: usize,
    pub direction: Rotation,
    /// Far endpoints of the interior spoke edges, in sweep order.
    pub spokes: Vec<usize>,
    /// Swept triangles, in sweep order. Always `spokes.len() + 1` long.
    pub triangles: Vec<usize>,
}

impl Fan {
    pub fn interior_edges(&self) -> Vec<EdgeRef> {
        self.spokes.iter().map(|&s| EdgeRef::new(self.center, s)).collect()
    }

    /// First and last ring neighbours of the fan in CCW order.
    pub fn ccw_bounds(&self) -> (usize, usize) {
        match self.direction {
            Rotation::Ccw => (self.from, self.to),
            Rotation::Cw => (self.to, self.from),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct TriMesh {
    positions: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    vert_tris: Vec<Vec<usize>>,
}

impl TriMesh {
    /// Builds a mesh and checks that it is a closed, consistently oriented
    /// 2-manifold without zero-length edges.
    pub fn new(positions: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mesh = Self::new_unchecked(positions, triangles)?;
        mesh.validate()?;
        Ok(mesh)
    }

    /// Builds the adjacency without the closed-manifold checks. Used for cut
    /// (disk) meshes. Indices are still range-checked.
    pub fn new_unchecked(positions: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mut vert_tris = vec![Vec::new(); positions.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= positions.len() {
                    return Err(MeshError::IndexOutOfRange(t));
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateTriangle(t));
            }
            for &v in tri {
                vert_tris[v].push(t);
            }
        }
        Ok(TriMesh { positions, triangles, vert_tris })
    }

    pub fn validate(&self) -> Result<()> {
        if self.triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        for (i, p) in self.positions.iter().enumerate() {
            if !p.iter().all(|c| c.is_finite()) {
                return Err(MeshError::NonFinite(i));
            }
        }
        // undirected edge -> (count, first triangle, uses in sorted direction)
        let mut edges: HashMap<(usize, usize), (usize, usize, usize)> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let e = edges.entry((a.min(b), a.max(b))).or_insert((0, t, 0));
                e.0 += 1;
                if a < b {
                    e.2 += 1;
                }
            }
        }
        let mut keys: Vec<_> = edges.iter().collect();
        keys.sort_by_key(|(k, _)| **k);
        for (&(a, b), &(count, tri, _)) in &keys {
            if count > 2 {
                return Err(MeshError::NonManifoldEdge { a, b, count, tri });
            }
        }
        for (&(a, b), &(count, tri, _)) in &keys {
            if count == 1 {
                return Err(MeshError::BoundaryEdge(a, b, tri));
            }
        }
        for (&(a, b), &(_, tri, fwd)) in &keys {
            if fwd != 1 {
                return Err(MeshError::InconsistentOrientation(a, b, tri));
            }
        }
        for (&(a, b), _) in &keys {
            if geom::dist(self.positions[a], self.positions[b]) == 0.0 {
                return Err(MeshError::ZeroLengthEdge(a, b));
            }
        }
        for v in 0..self.positions.len() {
            self.check_vertex(v)?;
        }
        Ok(())
    }

    /// Local manifold check for one vertex: referenced, and its one-ring is a
    /// single closed cycle.
    pub fn check_vertex(&self, v: usize) -> Result<()> {
        let tris = &self.vert_tris[v];
        if tris.is_empty() {
            return Err(MeshError::IsolatedVertex(v));
        }
        let mut next: HashMap<usize, usize> = HashMap::with_capacity(tris.len());
        for &t in tris {
            let (x, y) = self.opposite_pair(t, v);
            if next.insert(x, y).is_some() {
                return Err(MeshError::NonManifoldVertex(v));
            }
        }
        let start = *next.keys().min().unwrap();
        let mut cur = start;
        for _ in 0..tris.len() {
            cur = match next.get(&cur) {
                Some(&n) => n,
                None => return Err(MeshError::NonManifoldVertex(v)),
            };
            if cur == start {
                break;
            }
        }
        if cur != start {
            return Err(MeshError::NonManifoldVertex(v));
        }
        // one cycle must cover every incident triangle
        let mut len = 0;
        let mut cur = start;
        loop {
            cur = next[&cur];
            len += 1;
            if cur == start {
                break;
            }
        }
        if len != tris.len() {
            return Err(MeshError::NonManifoldVertex(v));
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges().len()
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn position(&self, v: usize) -> Vec3 {
        self.positions[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vert_tris[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        // closed manifold: one neighbour per incident triangle
        self.vert_tris[v].len()
    }

    pub fn triangle_positions(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.positions[a], self.positions[b], self.positions[c]]
    }

    /// Twice-area normal.
    pub fn triangle_cross(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangle_positions(t);
        geom::triangle_cross(a, b, c)
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        0.5 * geom::norm(self.triangle_cross(t))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn edge_length(&self, a: usize, b: usize) -> f64 {
        geom::dist(self.positions[a], self.positions[b])
    }

    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.positions {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    pub fn bbox_diagonal(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        geom::dist(lo, hi)
    }

    /// All undirected edges, sorted.
    pub fn edges(&self) -> Vec<EdgeRef> {
        let mut out: Vec<EdgeRef> = Vec::with_capacity(self.triangles.len() * 3 / 2 + 1);
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if a < b {
                    out.push(EdgeRef::new(a, b));
                } else if !self.has_directed_edge(b, a) {
                    // boundary edge of a disk mesh, only seen in one direction
                    out.push(EdgeRef::new(a, b));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn has_directed_edge(&self, a: usize, b: usize) -> bool {
        self.directed_edge_triangle(a, b).is_some()
    }

    /// Triangle containing the directed edge `a → b`.
    pub fn directed_edge_triangle(&self, a: usize, b: usize) -> Option<usize> {
        self.vert_tris[a].iter().copied().find(|&t| {
            let tri = self.triangles[t];
            (0..3).any(|k| tri[k] == a && tri[(k + 1) % 3] == b)
        })
    }

    /// Triangles incident to the undirected edge `(a, b)`.
    pub fn edge_triangles(&self, a: usize, b: usize) -> Vec<usize> {
        self.vert_tris[a]
            .iter()
            .copied()
            .filter(|&t| self.triangles[t].contains(&b))
            .collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.vert_tris[a].iter().any(|&t| self.triangles[t].contains(&b))
    }

    /// The two vertices of `t` other than `v`, in the triangle's orientation
    /// order, so that `(v, x, y)` is a rotation of the triangle.
    pub fn opposite_pair(&self, t: usize, v: usize) -> (usize, usize) {
        let tri = self.triangles[t];
        let k = tri.iter().position(|&x| x == v).expect("vertex not in triangle");
        (tri[(k + 1) % 3], tri[(k + 2) % 3])
    }

    /// CCW one-ring of an interior vertex: `(neighbours, triangles)` where
    /// `triangles[i]` is `(v, ring[i], ring[i + 1])`.
    pub fn one_ring(&self, v: usize) -> (Vec<usize>, Vec<usize>) {
        let tris = &self.vert_tris[v];
        let mut next: HashMap<usize, (usize, usize)> = HashMap::with_capacity(tris.len());
        let mut has_prev: HashMap<usize, bool> = HashMap::with_capacity(tris.len());
        for &t in tris {
            let (x, y) = self.opposite_pair(t, v);
            next.insert(x, (y, t));
            has_prev.insert(y, true);
            has_prev.entry(x).or_insert(false);
        }
        // boundary vertices start at the neighbour without a predecessor
        let start = has_prev
            .iter()
            .filter(|(_, &p)| !p)
            .map(|(&x, _)| x)
            .min()
            .unwrap_or_else(|| {
                let (x, _) = self.opposite_pair(tris[0], v);
                x
            });
        let mut ring = Vec::with_capacity(tris.len() + 1);
        let mut ring_tris = Vec::with_capacity(tris.len());
        let mut cur = start;
        loop {
            ring.push(cur);
            match next.get(&cur) {
                Some(&(n, t)) => {
                    ring_tris.push(t);
                    if n == start || ring_tris.len() == tris.len() {
                        if n != start {
                            ring.push(n);
                        }
                        break;
                    }
                    cur = n;
                }
                None => break,
            }
        }
        (ring, ring_tris)
    }

    /// Elements swept when rotating around `center` from `from_edge` to
    /// `to_edge` in `direction`. When both edges coincide the whole ring is
    /// swept.
    pub fn fan_between(
        &self,
        center: usize,
        from_edge: EdgeRef,
        to_edge: EdgeRef,
        direction: Rotation,
    ) -> Result<Fan> {
        let (fa, fb) = from_edge.endpoints();
        let from = from_edge.other(center).ok_or(MeshError::NotIncident(fa, fb, center))?;
        let (ta, tb) = to_edge.endpoints();
        let to = to_edge.other(center).ok_or(MeshError::NotIncident(ta, tb, center))?;
        let (ring, ring_tris) = self.one_ring(center);
        let d = ring_tris.len();
        let i_from = ring.iter().position(|&x| x == from).ok_or(MeshError::NoSuchEdge(fa, fb))?;
        let i_to = ring.iter().position(|&x| x == to).ok_or(MeshError::NoSuchEdge(ta, tb))?;
        let mut spokes = Vec::new();
        let mut triangles = Vec::new();
        match direction {
            Rotation::Ccw => {
                let mut steps = (i_to + d - i_from) % d;
                if steps == 0 {
                    steps = d;
                }
                for s in 0..steps {
                    let i = (i_from + s) % d;
                    triangles.push(ring_tris[i]);
                    if s + 1 < steps {
                        spokes.push(ring[(i + 1) % d]);
                    }
                }
            }
            Rotation::Cw => {
                let mut steps = (i_from + d - i_to) % d;
                if steps == 0 {
                    steps = d;
                }
                for s in 0..steps {
                    let i = (i_from + d - 1 - s) % d;
                    triangles.push(ring_tris[i]);
                    if s + 1 < steps {
                        spokes.push(ring[i]);
                    }
                }
            }
        }
        Ok(Fan { center, from, to, direction, spokes, triangles })
    }

    /// Euler characteristic `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    /// Number of connected components over triangle connectivity; isolated
    /// vertices count as their own component.
    pub fn connected_components(&self) -> usize {
        let n = self.positions.len();
        let mut seen = vec![false; n];
        let mut comps = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            comps += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &t in &self.vert_tris[v] {
                    for &w in &self.triangles[t] {
                        if !seen[w] {
                            seen[w] = true;
                            stack.push(w);
                        }
                    }
                }
            }
        }
        comps
    }

    /// Genus of a closed connected orientable mesh, `(2 - χ) / 2`.
    pub fn genus(&self) -> Result<usize> {
        if self.connected_components() != 1 {
            return Err(MeshError::Disconnected);
        }
        let chi = self.euler_characteristic();
        if chi % 2 != 0 || chi > 2 {
            return Err(MeshError::OddEulerCharacteristic(chi));
        }
        Ok(((2 - chi) / 2) as usize)
    }

    // ---- mutation ---------------------------------------------------------

    fn push_vertex(&mut self, p: Vec3) -> usize {
        self.positions.push(p);
        self.vert_tris.push(Vec::new());
        self.positions.len() - 1
    }

    fn push_triangle(&mut self, tri: [usize; 3]) -> usize {
        let t = self.triangles.len();
        self.triangles.push(tri);
        for &v in &tri {
            self.vert_tris[v].push(t);
        }
        t
    }

    fn replace_triangle(&mut self, t: usize, tri: [usize; 3]) {
        let old = self.triangles[t];
        for &v in &old {
            if !tri.contains(&v) {
                let list = &mut self.vert_tris[v];
                let k = list.iter().position(|&x| x == t).unwrap();
                list.swap_remove(k);
            }
        }
        for &v in &tri {
            if !old.contains(&v) {
                self.vert_tris[v].push(t);
            }
        }
        self.triangles[t] = tri;
    }

    /// Splits edge `(a, b)` at `pos`; every incident triangle is halved.
    /// Returns the new vertex.
    pub fn split_edge(&mut self, a: usize, b: usize, pos: Vec3) -> Result<usize> {
        let tris = self.edge_triangles(a, b);
        if tris.is_empty() {
            return Err(MeshError::NoSuchEdge(a, b));
        }
        let m = self.push_vertex(pos);
        for t in tris {
            let tri = self.triangles[t];
            let k = (0..3)
                .find(|&k| {
                    let (p, q) = (tri[k], tri[(k + 1) % 3]);
                    (p == a && q == b) || (p == b && q == a)
                })
                .unwrap();
            let (p, q, r) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
            self.replace_triangle(t, [p, m, r]);
            self.push_triangle([m, q, r]);
        }
        Ok(m)
    }

    /// Inserts a vertex at `pos` inside triangle `t`, replacing it with three
    /// triangles. Returns the new vertex.
    pub fn split_triangle(&mut self, t: usize, pos: Vec3) -> usize {
        let [a, b, c] = self.triangles[t];
        let m = self.push_vertex(pos);
        self.replace_triangle(t, [a, b, m]);
        self.push_triangle([b, c, m]);
        self.push_triangle([c, a, m]);
        m
    }

    /// Splits `center` along the two edges bounding `fan`: the fan triangles
    /// move to a new vertex at `pos`, and two triangles join the old and new
    /// copies. Returns the new vertex.
    pub fn split_vertex(&mut self, fan: &Fan, pos: Vec3) -> usize {
        let w = fan.center;
        let (first, last) = fan.ccw_bounds();
        let nv = self.push_vertex(pos);
        for &t in &fan.triangles {
            let mut tri = self.triangles[t];
            for v in tri.iter_mut() {
                if *v == w {
                    *v = nv;
                }
            }
            self.replace_triangle(t, tri);
        }
        self.push_triangle([w, first, nv]);
        self.push_triangle([w, nv, last]);
        nv
    }

    /// Moves a vertex. Used by smoothing in the synthetic generators.
    pub fn set_position(&mut self, v: usize, p: Vec3) {
        self.positions[v] = p;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn tetra() -> TriMesh {
        synth::tetrahedron()
    }

    #[test]
    fn tetrahedron_counts_and_genus() {
        let m = tetra();
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_triangles(), 4);
        assert_eq!(m.num_edges(), 6);
        assert_eq!(m.genus().unwrap(), 0);
    }

    #[test]
    fn torus_grid_genus_one() {
        let m = synth::torus(8, 8, 2.0, 0.7);
        assert_eq!(m.genus().unwrap(), 1);
        assert_eq!(3 * m.num_triangles(), 2 * m.num_edges());
    }

    #[test]
    fn rejects_edge_shared_by_three_triangles() {
        let p = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        let t = vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]];
        match TriMesh::new(p, t) {
            Err(MeshError::NonManifoldEdge { a: 0, b: 1, count: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_boundary_and_flipped() {
        let m = tetra();
        let mut tris = m.triangles().to_vec();
        let p = m.positions().to_vec();
        assert!(matches!(
            TriMesh::new(p.clone(), tris[..3].to_vec()),
            Err(MeshError::BoundaryEdge(..))
        ));
        tris[0].swap(0, 1);
        assert!(matches!(TriMesh::new(p, tris), Err(MeshError::InconsistentOrientation(..))));
    }

    #[test]
    fn rejects_pinch_vertex() {
        // two tetrahedra sharing a single vertex
        let a = tetra();
        let mut p = a.positions().to_vec();
        let mut t = a.triangles().to_vec();
        for q in &a.positions()[1..] {
            p.push([q[0] + 3.0, q[1], q[2]]);
        }
        let map = |v: usize| if v == 0 { 0 } else { v + 3 };
        for tri in a.triangles() {
            t.push([map(tri[0]), map(tri[1]), map(tri[2])]);
        }
        // move the shared apex so no edge is zero-length
        p[0] = [1.5, 0.0, 0.0];
        assert!(matches!(TriMesh::new(p, t), Err(MeshError::NonManifoldVertex(0))));
    }

    #[test]
    fn rejects_zero_length_edge() {
        let mut m = tetra();
        let p0 = m.position(0);
        m.set_position(1, p0);
        assert!(matches!(m.validate(), Err(MeshError::ZeroLengthEdge(0, 1))));
    }

    #[test]
    fn disconnected_genus_error() {
        let a = tetra();
        let mut p = a.positions().to_vec();
        let mut t = a.triangles().to_vec();
        for q in a.positions() {
            p.push([q[0] + 5.0, q[1], q[2]]);
        }
        for tri in a.triangles() {
            t.push([tri[0] + 4, tri[1] + 4, tri[2] + 4]);
        }
        let m = TriMesh::new(p, t).unwrap();
        assert!(matches!(m.genus(), Err(MeshError::Disconnected)));
    }

    fn valence6() -> TriMesh {
        // hexagonal umbrella closed by a cone apex below
        let mut p = vec![[0.0, 0.0, 0.0]];
        for i in 0..6 {
            let a = std::f64::consts::PI / 3.0 * i as f64;
            p.push([a.cos(), a.sin(), 0.0]);
        }
        p.push([0.0, 0.0, -1.0]);
        let mut t = Vec::new();
        for i in 0..6 {
            let (a, b) = (1 + i, 1 + (i + 1) % 6);
            t.push([0, a, b]);
            t.push([7, b, a]);
        }
        TriMesh::new(p, t).unwrap()
    }

    #[test]
    fn fan_adjacent_edges_is_single_triangle() {
        let m = valence6();
        let f = m.fan_between(0, EdgeRef::new(0, 1), EdgeRef::new(0, 2), Rotation::Ccw).unwrap();
        assert!(f.spokes.is_empty());
        assert_eq!(f.triangles.len(), 1);
    }

    #[test]
    fn fan_opposite_edges() {
        let m = valence6();
        let ccw = m.fan_between(0, EdgeRef::new(0, 1), EdgeRef::new(0, 4), Rotation::Ccw).unwrap();
        assert_eq!(ccw.spokes, vec![2, 3]);
        assert_eq!(ccw.triangles.len(), 3);
        let cw = m.fan_between(0, EdgeRef::new(0, 1), EdgeRef::new(0, 4), Rotation::Cw).unwrap();
        assert_eq!(cw.spokes, vec![6, 5]);
        assert_eq!(ccw.triangles.len() + cw.triangles.len(), m.valence(0));
    }

    #[test]
    fn fan_rejects_non_incident() {
        let m = valence6();
        assert!(matches!(
            m.fan_between(0, EdgeRef::new(1, 2), EdgeRef::new(0, 4), Rotation::Ccw),
            Err(MeshError::NotIncident(1, 2, 0))
        ));
    }

    #[test]
    fn split_operators_keep_manifold() {
        let mut m = valence6();
        let g0 = m.genus().unwrap();
        let (v0, t0) = (m.num_vertices(), m.num_triangles());
        m.split_edge(0, 3, [-0.25, 0.43, 0.0]).unwrap();
        assert_eq!((m.num_vertices(), m.num_triangles()), (v0 + 1, t0 + 2));
        m.split_triangle(0, [0.3, 0.2, 0.0]);
        assert_eq!((m.num_vertices(), m.num_triangles()), (v0 + 2, t0 + 4));
        let fan = m.fan_between(0, EdgeRef::new(0, 1), EdgeRef::new(0, 5), Rotation::Cw).unwrap();
        m.split_vertex(&fan, [0.3, -0.4, 0.0]);
        assert_eq!((m.num_vertices(), m.num_triangles()), (v0 + 3, t0 + 6));
        m.validate().unwrap();
        assert_eq!(m.genus().unwrap(), g0);
    }
}
