//! Greedy homotopy basis via tree-cotree decomposition.
//!
//! The primal tree is the Dijkstra shortest-path tree from the root. Every
//! remaining edge `(u, v)` closes a loop `σ(u) · uv · σ(v)⁻¹` whose weight is
//! `d(u) + |uv| + d(v)`. A maximum-weight spanning tree of the dual graph over
//! those edges is taken as the cotree; the `2g` edges left over define the
//! shortest system of loops based at the root.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{EdgeRef, MeshError, TriMesh};
use crate::par::{self, Execution};
use crate::schema::cut_open;
use crate::union_find::UnionFind;

/// Default vertex cap for [`globally_shortest_basis`].
pub const GLOBAL_VERTEX_CAP: usize = 5_000;

#[derive(Debug, Error)]
pub enum BasisError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("root vertex {root} out of range (mesh has {n} vertices)")]
    RootOutOfRange { root: usize, n: usize },
    #[error("mesh has {n} vertices, above the cap of {cap} for the global search")]
    VertexCapExceeded { n: usize, cap: usize },
    #[error("loop file parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid loop system: {0}")]
    InvalidSystem(String),
}

/// A closed vertex path starting and ending at the system origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Loop {
    pub vertices: Vec<usize>,
    pub length: f64,
}

impl Loop {
    pub fn from_vertices(mesh: &TriMesh, vertices: Vec<usize>) -> Self {
        let length = vertices.windows(2).map(|w| mesh.edge_length(w[0], w[1])).sum();
        Loop { vertices, length }
    }

    pub fn origin(&self) -> usize {
        self.vertices[0]
    }

    /// Number of edges traversed.
    pub fn hops(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.vertices.windows(2).map(|w| EdgeRef::new(w[0], w[1]))
    }

    pub fn edge_set(&self) -> HashSet<EdgeRef> {
        self.edges().collect()
    }

    /// Reverses the loop if the reversed vertex sequence is lexicographically
    /// smaller.
    pub fn canonicalize(&mut self) {
        let rev: Vec<usize> = self.vertices.iter().rev().copied().collect();
        if rev < self.vertices {
            self.vertices = rev;
        }
    }
}

/// `2g` loops sharing an origin vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopSystem {
    pub origin: usize,
    pub loops: Vec<Loop>,
}

impl LoopSystem {
    pub fn empty(origin: usize) -> Self {
        LoopSystem { origin, loops: Vec::new() }
    }

    pub fn total_length(&self) -> f64 {
        self.loops.iter().map(|l| l.length).sum()
    }

    /// Union of all loop edges.
    pub fn edge_union(&self) -> HashSet<EdgeRef> {
        self.loops.iter().flat_map(|l| l.edges()).collect()
    }

    /// Recomputes loop lengths against `mesh`.
    pub fn with_lengths(mut self, mesh: &TriMesh) -> Self {
        for l in &mut self.loops {
            *l = Loop::from_vertices(mesh, std::mem::take(&mut l.vertices));
        }
        self
    }

    /// Loop file: `origin <v>` then one whitespace-separated vertex list per
    /// loop.
    pub fn to_text(&self) -> String {
        let mut s = format!("origin {}\n", self.origin);
        for l in &self.loops {
            let line: Vec<String> = l.vertices.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    /// Parses a loop file. Lengths are left at zero until
    /// [`LoopSystem::with_lengths`] is called.
    pub fn from_text(text: &str) -> Result<Self, BasisError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or(BasisError::Parse { line: 1, msg: "empty loop file".into() })?;
        let mut toks = header.split_whitespace();
        let origin = match (toks.next(), toks.next().map(str::parse::<usize>)) {
            (Some("origin"), Some(Ok(v))) => v,
            _ => return Err(BasisError::Parse { line: hl + 1, msg: "expected `origin <vertex>`".into() }),
        };
        let mut loops = Vec::new();
        for (i, l) in lines {
            let vertices = l
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| BasisError::Parse { line: i + 1, msg: e.to_string() })?;
            loops.push(Loop { vertices, length: 0.0 });
        }
        Ok(LoopSystem { origin, loops })
    }

    /// Checks the system against `mesh`: closed loops at the origin along mesh
    /// edges, `2g` loops, pairwise distinct edge sets, and the union of loop
    /// edges cuts the mesh into one disk.
    pub fn validate(&self, mesh: &TriMesh) -> Result<(), BasisError> {
        let n = mesh.num_vertices();
        if self.origin >= n {
            return Err(BasisError::RootOutOfRange { root: self.origin, n });
        }
        let g = mesh.genus()?;
        if self.loops.len() != 2 * g {
            return Err(BasisError::InvalidSystem(format!("{} loops for genus {g}", self.loops.len())));
        }
        for (i, l) in self.loops.iter().enumerate() {
            let v = &l.vertices;
            if v.len() < 4 || v[0] != self.origin || v[v.len() - 1] != self.origin {
                return Err(BasisError::InvalidSystem(format!("loop {i} does not start and end at the origin")));
            }
            for w in v.windows(2) {
                if w[0] >= n || w[1] >= n || !mesh.has_edge(w[0], w[1]) {
                    return Err(BasisError::InvalidSystem(format!("loop {i} steps along a non-edge {w:?}")));
                }
            }
        }
        let sets: Vec<Vec<EdgeRef>> = self
            .loops
            .iter()
            .map(|l| {
                let mut e: Vec<EdgeRef> = l.edge_set().into_iter().collect();
                e.sort_unstable();
                e
            })
            .collect();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if sets[i] == sets[j] {
                    return Err(BasisError::InvalidSystem(format!("loops {i} and {j} coincide")));
                }
            }
        }
        if g > 0 {
            let cut = self.edge_union();
            let opened = cut_open(mesh, |a, b| cut.contains(&EdgeRef::new(a, b)));
            if !opened.is_disk() {
                return Err(BasisError::InvalidSystem("cutting along the loops does not give a disk".into()));
            }
        }
        Ok(())
    }
}

/// Full output of the tree-cotree construction.
#[derive(Clone, Debug)]
pub struct GreedyBasis {
    pub system: LoopSystem,
    /// Shortest-path distance from the root.
    pub dist: Vec<f64>,
    /// Shortest-path tree parent (`None` at the root).
    pub parent: Vec<Option<usize>>,
    /// Primal edges whose duals form the spanning cotree.
    pub cotree: Vec<EdgeRef>,
    /// Edge defining each loop, in loop order.
    pub generators: Vec<EdgeRef>,
    /// Weight `d(u) + |uv| + d(v)` of each generator.
    pub weights: Vec<f64>,
}

#[derive(Copy, Clone, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    // min-heap on (distance, vertex)
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn neighbours(mesh: &TriMesh, edges: &[EdgeRef]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); mesh.num_vertices()];
    for e in edges {
        let (a, b) = e.endpoints();
        adj[a].push(b);
        adj[b].push(a);
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    adj
}

/// Dijkstra shortest-path tree with Euclidean edge lengths. Vertices are
/// settled in `(distance, index)` order, so ties resolve to smaller indices.
pub fn shortest_path_tree(mesh: &TriMesh, root: usize) -> (Vec<f64>, Vec<Option<usize>>) {
    let adj = neighbours(mesh, &mesh.edges());
    dijkstra(mesh, &adj, root)
}

fn dijkstra(mesh: &TriMesh, adj: &[Vec<usize>], root: usize) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = mesh.num_vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[root] = 0.0;
    heap.push(HeapItem(0.0, root));
    while let Some(HeapItem(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &v in &adj[u] {
            if done[v] {
                continue;
            }
            let nd = d + mesh.edge_length(u, v);
            if nd < dist[v] {
                dist[v] = nd;
                parent[v] = Some(u);
                heap.push(HeapItem(nd, v));
            }
        }
    }
    (dist, parent)
}

fn tree_path(parent: &[Option<usize>], mut v: usize) -> Vec<usize> {
    let mut path = vec![v];
    while let Some(p) = parent[v] {
        path.push(p);
        v = p;
    }
    path
}

struct Decomposition {
    edges: Vec<EdgeRef>,
    adj: Vec<Vec<usize>>,
    edge_tris: HashMap<EdgeRef, [usize; 2]>,
}

impl Decomposition {
    fn new(mesh: &TriMesh) -> Self {
        let mut edge_tris: HashMap<EdgeRef, [usize; 2]> = HashMap::with_capacity(mesh.num_triangles() * 3 / 2);
        for (t, tri) in mesh.triangles().iter().enumerate() {
            for k in 0..3 {
                let e = EdgeRef::new(tri[k], tri[(k + 1) % 3]);
                edge_tris.entry(e).and_modify(|s| s[1] = t).or_insert([t, usize::MAX]);
            }
        }
        let mut edges: Vec<EdgeRef> = edge_tris.keys().copied().collect();
        edges.sort_unstable();
        let adj = neighbours(mesh, &edges);
        Decomposition { edges, adj, edge_tris }
    }

    fn run(&self, mesh: &TriMesh, root: usize) -> GreedyBasis {
        let (dist, parent) = dijkstra(mesh, &self.adj, root);
        let is_tree = |e: &EdgeRef| {
            let (a, b) = e.endpoints();
            parent[a] == Some(b) || parent[b] == Some(a)
        };
        let mut candidates: Vec<(f64, EdgeRef)> = self
            .edges
            .iter()
            .filter(|e| !is_tree(e))
            .map(|&e| {
                let (a, b) = e.endpoints();
                (dist[a] + mesh.edge_length(a, b) + dist[b], e)
            })
            .collect();
        // maximum spanning cotree: heaviest loops are absorbed first
        candidates.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
        let mut uf = UnionFind::new(mesh.num_triangles());
        let mut cotree = Vec::new();
        let mut leftover = Vec::new();
        for &(w, e) in &candidates {
            let [t0, t1] = self.edge_tris[&e];
            if uf.union(t0, t1) {
                cotree.push(e);
            } else {
                leftover.push((w, e));
            }
        }
        leftover.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
        let mut loops = Vec::with_capacity(leftover.len());
        for &(_, e) in &leftover {
            let (u, v) = e.endpoints();
            let mut seq: Vec<usize> = tree_path(&parent, u).into_iter().rev().collect();
            seq.extend(tree_path(&parent, v));
            let mut l = Loop::from_vertices(mesh, seq);
            l.canonicalize();
            loops.push(l);
        }
        GreedyBasis {
            system: LoopSystem { origin: root, loops },
            dist,
            parent,
            cotree,
            generators: leftover.iter().map(|x| x.1).collect(),
            weights: leftover.iter().map(|x| x.0).collect(),
        }
    }
}

/// Tree-cotree decomposition and loop construction rooted at `root`.
pub fn greedy_basis_detailed(mesh: &TriMesh, root: usize) -> Result<GreedyBasis, BasisError> {
    let n = mesh.num_vertices();
    if root >= n {
        return Err(BasisError::RootOutOfRange { root, n });
    }
    mesh.genus()?;
    Ok(Decomposition::new(mesh).run(mesh, root))
}

/// Shortest system of loops based at `root`, in greedy (ascending length)
/// order. Genus 0 gives an empty system.
pub fn greedy_basis(mesh: &TriMesh, root: usize) -> Result<LoopSystem, BasisError> {
    Ok(greedy_basis_detailed(mesh, root)?.system)
}

/// Globally shortest system of loops: the greedy basis over every root,
/// minimised by total length (ties to the smaller root). Refuses meshes above
/// `vertex_cap` vertices.
pub fn globally_shortest_basis(
    mesh: &TriMesh,
    vertex_cap: usize,
    exec: Execution,
) -> Result<LoopSystem, BasisError> {
    let n = mesh.num_vertices();
    if n > vertex_cap {
        return Err(BasisError::VertexCapExceeded { n, cap: vertex_cap });
    }
    let g = mesh.genus()?;
    if g == 0 {
        return Ok(LoopSystem::empty(0));
    }
    let dec = Decomposition::new(mesh);
    let totals = par::map_range(exec, n, |r| dec.run(mesh, r).system.total_length());
    let best = (0..n)
        .min_by(|&a, &b| totals[a].total_cmp(&totals[b]).then(a.cmp(&b)))
        .expect("non-empty mesh");
    Ok(dec.run(mesh, best).system)
}

/// How the root of a basis is picked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootChoice {
    Index(usize),
    /// Uniform over the vertices, from a seeded generator.
    Random(u64),
    /// The root of the globally shortest system (subject to the vertex cap).
    Global,
}

impl RootChoice {
    /// The seeded random vertex for `Random`; the index for `Index`.
    pub fn resolve(self, mesh: &TriMesh) -> Option<usize> {
        match self {
            RootChoice::Index(i) => Some(i),
            RootChoice::Random(seed) => {
                Some(ChaCha8Rng::seed_from_u64(seed).random_range(0..mesh.num_vertices().max(1)))
            }
            RootChoice::Global => None,
        }
    }
}

/// Basis for the given root choice.
pub fn basis_for(mesh: &TriMesh, choice: RootChoice, vertex_cap: usize, exec: Execution) -> Result<LoopSystem, BasisError> {
    match choice.resolve(mesh) {
        Some(root) => greedy_basis(mesh, root),
        None => globally_shortest_basis(mesh, vertex_cap, exec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn sphere_has_empty_basis() {
        let m = synth::tetrahedron();
        assert!(greedy_basis(&m, 0).unwrap().loops.is_empty());
        assert!(globally_shortest_basis(&m, 10, Execution::Sequential).unwrap().loops.is_empty());
    }

    #[test]
    fn torus_has_two_loops_and_cuts_to_disk() {
        let m = synth::torus(8, 8, 2.0, 0.7);
        let s = greedy_basis(&m, 5).unwrap();
        assert_eq!(s.loops.len(), 2);
        s.validate(&m).unwrap();
    }

    #[test]
    fn decomposition_partitions_edges() {
        let m = synth::double_torus(2);
        let b = greedy_basis_detailed(&m, 3).unwrap();
        let tree = b.parent.iter().filter(|p| p.is_some()).count();
        assert_eq!(tree, m.num_vertices() - 1);
        assert_eq!(b.cotree.len(), m.num_triangles() - 1);
        assert_eq!(b.generators.len(), 4);
        assert_eq!(tree + b.cotree.len() + b.generators.len(), m.num_edges());
        assert!(b.weights.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn root_out_of_range() {
        let m = synth::tetrahedron();
        assert!(matches!(greedy_basis(&m, 9), Err(BasisError::RootOutOfRange { root: 9, n: 4 })));
    }

    #[test]
    fn global_cap_enforced() {
        let m = synth::torus(8, 8, 2.0, 0.7);
        assert!(matches!(
            globally_shortest_basis(&m, 10, Execution::Sequential),
            Err(BasisError::VertexCapExceeded { n: 64, cap: 10 })
        ));
    }

    #[test]
    fn loop_file_round_trip() {
        let m = synth::torus(6, 6, 2.0, 0.7);
        let s = greedy_basis(&m, 0).unwrap();
        let back = LoopSystem::from_text(&s.to_text()).unwrap().with_lengths(&m);
        assert_eq!(back, s);
        assert!(LoopSystem::from_text("root 3\n").is_err());
        assert!(LoopSystem::from_text("origin 0\n0 1 x 0\n").is_err());
    }

    #[test]
    fn validate_rejects_coincident_loops() {
        let m = synth::torus(6, 6, 2.0, 0.7);
        let mut s = greedy_basis(&m, 0).unwrap();
        s.loops[1] = s.loops[0].clone();
        assert!(matches!(s.validate(&m), Err(BasisError::InvalidSystem(_))));
    }
}
