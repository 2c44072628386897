//! Loop bookkeeping during refinement: which loops pass through each vertex,
//! merging-site detection, and rerouting a bundle through a corridor.

use std::collections::HashSet;

use super::DetachError;
use crate::basis::{Loop, LoopSystem};
use crate::mesh::{EdgeRef, Fan, Rotation, TriMesh};

/// Loops entering a merging vertex through the same edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bundle {
    /// Far endpoint of the ingoing edge (`v_in`).
    pub from: usize,
    /// Indices of the loops in the bundle, ascending, without repeats.
    pub loops: Vec<usize>,
    /// Number of loop passages (a loop may pass twice on a shared stem).
    pub passages: usize,
}

/// A vertex where two or more bundles converge onto one outgoing edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergingSite {
    pub vertex: usize,
    /// Far endpoint of the outgoing edge (`v_out`), one step closer to the
    /// origin.
    pub out: usize,
    /// Ingoing bundles ordered CCW starting after the outgoing edge.
    pub bundles: Vec<Bundle>,
    pub valence: usize,
}

impl MergingSite {
    pub fn out_edge(&self) -> EdgeRef {
        EdgeRef::new(self.vertex, self.out)
    }

    pub fn in_edges(&self) -> Vec<EdgeRef> {
        self.bundles.iter().map(|b| EdgeRef::new(self.vertex, b.from)).collect()
    }

    /// The bundle detached when refining on `side`: the first ingoing edge met
    /// when rotating from the outgoing edge in that direction.
    pub fn bundle_on(&self, side: Rotation) -> &Bundle {
        match side {
            Rotation::Ccw => &self.bundles[0],
            Rotation::Cw => self.bundles.last().expect("site has at least two bundles"),
        }
    }

    /// The fan between the outgoing edge and the nearest ingoing edge on
    /// `side`.
    pub fn fan(&self, mesh: &TriMesh, side: Rotation) -> Result<Fan, DetachError> {
        let b = self.bundle_on(side);
        Ok(mesh.fan_between(self.vertex, self.out_edge(), EdgeRef::new(self.vertex, b.from), side)?)
    }
}

const NIL: usize = usize::MAX;

/// One visit of a loop to a vertex, linked to its neighbours along the loop.
#[derive(Clone, Copy, Debug)]
struct Node {
    vertex: usize,
    prev: usize,
    next: usize,
    on_loop: usize,
}

/// Loop paths as linked node lists plus, for every vertex, the interior
/// nodes sitting on it. Rerouting a passage touches only the nodes involved.
#[derive(Clone, Debug)]
pub(crate) struct LoopState {
    pub origin: usize,
    nodes: Vec<Node>,
    heads: Vec<usize>,
    at_vertex: Vec<Vec<usize>>,
}

impl LoopState {
    pub fn new(mesh: &TriMesh, system: &LoopSystem) -> Result<Self, DetachError> {
        let n = mesh.num_vertices();
        let origin = system.origin;
        if origin >= n {
            return Err(DetachError::InvalidSystem(format!("origin {origin} out of range")));
        }
        let mut state = LoopState { origin, nodes: Vec::new(), heads: Vec::new(), at_vertex: vec![Vec::new(); n] };
        for (i, l) in system.loops.iter().enumerate() {
            let v = &l.vertices;
            if v.len() < 4 || v[0] != origin || v[v.len() - 1] != origin {
                return Err(DetachError::InvalidSystem(format!("loop {i} is not closed at the origin")));
            }
            if v[1..v.len() - 1].contains(&origin) {
                return Err(DetachError::InvalidSystem(format!("loop {i} revisits the origin")));
            }
            for w in v.windows(2) {
                if w[0] >= n || w[1] >= n || !mesh.has_edge(w[0], w[1]) {
                    return Err(DetachError::InvalidSystem(format!("loop {i} steps along a non-edge {w:?}")));
                }
            }
            let base = state.nodes.len();
            for (k, &x) in v.iter().enumerate() {
                let prev = if k == 0 { NIL } else { base + k - 1 };
                let next = if k + 1 == v.len() { NIL } else { base + k + 1 };
                state.nodes.push(Node { vertex: x, prev, next, on_loop: i });
                if k > 0 && k + 1 < v.len() {
                    state.at_vertex[x].push(base + k);
                }
            }
            state.heads.push(base);
        }
        let sets: Vec<Vec<EdgeRef>> = system
            .loops
            .iter()
            .map(|l| {
                let mut e: Vec<EdgeRef> = l.edges().collect::<HashSet<_>>().into_iter().collect();
                e.sort_unstable();
                e
            })
            .collect();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if sets[i] == sets[j] {
                    return Err(DetachError::CoincidentLoops(i, j));
                }
            }
        }
        Ok(state)
    }

    fn grow(&mut self, n: usize) {
        if self.at_vertex.len() < n {
            self.at_vertex.resize(n, Vec::new());
        }
    }

    /// `(loop, node, prev, next)` for every pass of a loop through `w`.
    fn passages(&self, w: usize) -> Vec<(usize, usize, usize, usize)> {
        self.at_vertex
            .get(w)
            .map_or(&[][..], |x| x.as_slice())
            .iter()
            .map(|&k| {
                let nd = self.nodes[k];
                (nd.on_loop, k, self.nodes[nd.prev].vertex, self.nodes[nd.next].vertex)
            })
            .collect()
    }

    /// The merging site at `w`, if two or more distinct ingoing edges feed a
    /// common outgoing edge there.
    pub fn site_at(&self, mesh: &TriMesh, w: usize) -> Result<Option<MergingSite>, DetachError> {
        if w == self.origin {
            return Ok(None);
        }
        let passages = self.passages(w);
        let mut pairs: Vec<(usize, usize)> = passages.iter().map(|&(_, _, a, b)| (a.min(b), a.max(b))).collect();
        pairs.sort_unstable();
        pairs.dedup();
        if pairs.len() < 2 {
            return Ok(None);
        }
        let (a, b) = pairs[0];
        let common: Vec<usize> =
            [a, b].into_iter().filter(|&c| pairs.iter().all(|&(x, y)| x == c || y == c)).collect();
        if common.len() != 1 {
            return Err(DetachError::NotCommonSuffix(w));
        }
        let out = common[0];
        let (ring, _) = mesh.one_ring(w);
        let d = ring.len();
        let pos = |v: usize| ring.iter().position(|&x| x == v).expect("loop edge in one-ring");
        let i_out = pos(out);
        let mut bundles: Vec<(usize, Bundle)> = Vec::new();
        for &(x, y) in &pairs {
            let from = if x == out { y } else { x };
            let mut loops: Vec<usize> = Vec::new();
            let mut count = 0;
            for &(l, _, p, n) in &passages {
                if (p == from && n == out) || (p == out && n == from) {
                    count += 1;
                    if !loops.contains(&l) {
                        loops.push(l);
                    }
                }
            }
            loops.sort_unstable();
            let rot = (pos(from) + d - i_out) % d;
            bundles.push((rot, Bundle { from, loops, passages: count }));
        }
        bundles.sort_by_key(|(r, _)| *r);
        Ok(Some(MergingSite {
            vertex: w,
            out,
            bundles: bundles.into_iter().map(|(_, b)| b).collect(),
            valence: mesh.valence(w),
        }))
    }

    /// Every merging site, in vertex order.
    pub fn all_sites(&self, mesh: &TriMesh) -> Result<Vec<MergingSite>, DetachError> {
        let mut out = Vec::new();
        for v in 0..self.at_vertex.len().min(mesh.num_vertices()) {
            if self.at_vertex[v].len() > 1 {
                if let Some(s) = self.site_at(mesh, v)? {
                    out.push(s);
                }
            }
        }
        Ok(out)
    }

    /// Replaces each pass `from → w → out` (either direction) of the given
    /// loops by `from → corridor… → out`. `corridor` is ordered from `out`
    /// towards `from`.
    pub fn reroute(&mut self, loops: &[usize], w: usize, from: usize, out: usize, corridor: &[usize]) {
        for &c in corridor {
            self.grow(c + 1);
        }
        let hits: Vec<(usize, usize, usize)> = self
            .passages(w)
            .into_iter()
            .filter(|&(l, _, p, n)| loops.contains(&l) && ((p == from && n == out) || (p == out && n == from)))
            .map(|(l, k, p, _)| (l, k, p))
            .collect();
        for (l, k, p) in hits {
            let Node { prev, next, .. } = self.nodes[k];
            let forward = p == out;
            let mut last = prev;
            for i in 0..corridor.len() {
                let c = if forward { corridor[i] } else { corridor[corridor.len() - 1 - i] };
                let id = self.nodes.len();
                self.nodes.push(Node { vertex: c, prev: last, next: NIL, on_loop: l });
                self.nodes[last].next = id;
                self.at_vertex[c].push(id);
                last = id;
            }
            self.nodes[last].next = next;
            self.nodes[next].prev = last;
            let list = &mut self.at_vertex[w];
            let i = list.iter().position(|&x| x == k).expect("node listed at its vertex");
            list.swap_remove(i);
        }
    }

    pub fn path(&self, l: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut k = self.heads[l];
        while k != NIL {
            out.push(self.nodes[k].vertex);
            k = self.nodes[k].next;
        }
        out
    }

    pub fn to_system(&self, mesh: &TriMesh) -> LoopSystem {
        LoopSystem {
            origin: self.origin,
            loops: (0..self.heads.len()).map(|l| Loop::from_vertices(mesh, self.path(l))).collect(),
        }
    }
}
