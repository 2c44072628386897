//! Cutting along a disjoint system of loops and embedding the resulting disk
//! on the canonical `4g`-gon.

mod cut;
mod layout;
mod locate;

pub use cut::{cut_open, OpenedMesh};
pub use layout::{layout_canonical, polygon_area, polygon_corner, BoundaryVertex, Provenance, SchemaLayout};
pub use locate::{map_point, PointGrid, SNAP_EPS};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::LoopSystem;
use crate::detach::loops_are_disjoint;
use crate::mesh::{EdgeRef, MeshError, TriMesh};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("loops are not disjoint away from the origin")]
    NotDisjoint,
    #[error("expected {expected} loops for genus {genus}, got {got}")]
    LoopCount { genus: usize, expected: usize, got: usize },
    #[error("cut result is not a disk (chi = {chi}, {cycles} boundary cycles)")]
    NotADisk { chi: i64, cycles: usize },
    #[error("boundary arcs do not match the loops: {0}")]
    ArcMismatch(String),
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("linear solve did not converge (residual {0:e})")]
    Singular(f64),
    #[error("triangle {0} out of range")]
    TriangleOutOfRange(usize),
    #[error("point ({0}, {1}) is outside the polygon")]
    OutsidePolygon(f64, f64),
    #[error("layout file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Which copy of a loop an arc carries: `Forward` runs along the loop's
/// direction, `Reverse` against it (the barred copy).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopCopy {
    Forward,
    Reverse,
}

impl LoopCopy {
    pub fn flip(self) -> LoopCopy {
        match self {
            LoopCopy::Forward => LoopCopy::Reverse,
            LoopCopy::Reverse => LoopCopy::Forward,
        }
    }
}

/// A maximal boundary run between two consecutive copies of the origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub loop_index: usize,
    pub copy: LoopCopy,
    /// Index into [`CutMesh::boundary`] of the arc's first corner.
    pub start: usize,
    /// Number of boundary edges in the arc.
    pub len: usize,
}

/// A closed mesh cut open into a disk along a system of loops.
#[derive(Clone, Debug)]
pub struct CutMesh {
    pub disk: TriMesh,
    /// Disk vertex → vertex of the closed mesh.
    pub source: Vec<usize>,
    pub origin: usize,
    pub genus: usize,
    /// The boundary cycle (interior on the left), starting at the corner
    /// that opens side 0.
    pub boundary: Vec<usize>,
    /// Arcs in boundary order; `arcs[j]` becomes polygon side `j`.
    pub arcs: Vec<Arc>,
}

impl CutMesh {
    pub fn word(&self) -> Vec<(usize, LoopCopy)> {
        self.arcs.iter().map(|a| (a.loop_index, a.copy)).collect()
    }

    /// Boundary positions of the `4g` origin copies.
    pub fn corners(&self) -> Vec<usize> {
        self.arcs.iter().map(|a| self.boundary[a.start]).collect()
    }

    pub fn origin_multiplicity(&self) -> usize {
        self.source.iter().filter(|&&s| s == self.origin).count()
    }

    /// Vertices of arc `j` in boundary order, both corners included.
    pub fn arc_vertices(&self, j: usize) -> Vec<usize> {
        let a = &self.arcs[j];
        let n = self.boundary.len();
        (0..=a.len).map(|i| self.boundary[(a.start + i) % n]).collect()
    }

    /// Whether the arc word is `ℓa ℓb ℓ̄a ℓ̄b …` block by block, up to cyclic
    /// rotation and reversal.
    pub fn is_canonical_word(&self) -> bool {
        is_canonical_word(&self.word())
    }

    /// Number of vertex classes of the `4g`-gon after gluing its sides by the
    /// arc word. A valid one-vertex schema gives 1.
    pub fn glued_corner_classes(&self) -> usize {
        glued_corner_classes(&self.word())
    }
}

/// Checks the structural gluing conditions on a word: every loop appears
/// exactly twice, once per copy.
pub fn word_pairs_loops(word: &[(usize, LoopCopy)], loops: usize) -> bool {
    let mut seen = vec![[0usize; 2]; loops];
    for &(l, c) in word {
        if l >= loops {
            return false;
        }
        seen[l][c as usize] += 1;
    }
    seen.iter().all(|s| *s == [1, 1])
}

pub fn is_canonical_word(word: &[(usize, LoopCopy)]) -> bool {
    let n = word.len();
    if n == 0 || !n.is_multiple_of(4) {
        return false;
    }
    let blocks_ok = |w: &dyn Fn(usize) -> (usize, LoopCopy)| {
        (0..n / 4).all(|b| {
            let (a0, a1, a2, a3) = (w(4 * b), w(4 * b + 1), w(4 * b + 2), w(4 * b + 3));
            a0.0 == a2.0 && a1.0 == a3.0 && a0.0 != a1.0 && a0.1 != a2.1 && a1.1 != a3.1
        })
    };
    (0..n).any(|r| {
        // reading forwards or backwards (reversal also swaps copies)
        let fwd = |i: usize| word[(r + i) % n];
        let bwd = |i: usize| {
            let (l, c) = word[(r + n - i) % n];
            (l, c.flip())
        };
        blocks_ok(&fwd) || blocks_ok(&bwd)
    })
}

pub fn glued_corner_classes(word: &[(usize, LoopCopy)]) -> usize {
    let n = word.len();
    if n == 0 {
        return 0;
    }
    // side j runs from corner j to corner j + 1; a Forward side starts at the
    // loop's tail, a Reverse side at its head
    let mut uf = crate::union_find::UnionFind::new(n);
    let mut first: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for (j, &(l, _)) in word.iter().enumerate() {
        if let Some(&i) = first.get(&l) {
            let ends = |s: usize| {
                let (a, b) = (s, (s + 1) % n);
                if word[s].1 == LoopCopy::Forward {
                    (a, b)
                } else {
                    (b, a)
                }
            };
            let (ti, hi) = ends(i);
            let (tj, hj) = ends(j);
            uf.union(ti, tj);
            uf.union(hi, hj);
        } else {
            first.insert(l, j);
        }
    }
    let mut roots: Vec<usize> = (0..n).map(|c| uf.find(c)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Cuts `mesh` along the loops of `system`.
pub fn cut_along(mesh: &TriMesh, system: &LoopSystem) -> Result<CutMesh, SchemaError> {
    let genus = mesh.genus()?;
    if system.loops.len() != 2 * genus {
        return Err(SchemaError::LoopCount { genus, expected: 2 * genus, got: system.loops.len() });
    }
    for l in &system.loops {
        for w in l.vertices.windows(2) {
            if !mesh.has_edge(w[0], w[1]) {
                return Err(SchemaError::ArcMismatch(format!("loop steps along non-edge {w:?}")));
            }
        }
    }
    if !loops_are_disjoint(system) {
        return Err(SchemaError::NotDisjoint);
    }
    let cut_edges = system.edge_union();
    let opened = cut_open(mesh, |a, b| cut_edges.contains(&EdgeRef::new(a, b)));
    let cycles = opened.boundary_cycles();
    if !opened.is_disk() {
        return Err(SchemaError::NotADisk { chi: opened.euler_characteristic(), cycles: cycles.len() });
    }
    let cycle = &cycles[0];
    let origin = system.origin;
    let corners: Vec<usize> = (0..cycle.len()).filter(|&i| opened.source[cycle[i]] == origin).collect();
    if corners.len() != 4 * genus {
        return Err(SchemaError::ArcMismatch(format!("{} origin copies on the boundary, expected {}", corners.len(), 4 * genus)));
    }
    let n = cycle.len();
    let mut arcs = Vec::with_capacity(corners.len());
    for (ci, &start) in corners.iter().enumerate() {
        let end = corners[(ci + 1) % corners.len()];
        let len = (end + n - start) % n;
        let src: Vec<usize> = (0..=len).map(|i| opened.source[cycle[(start + i) % n]]).collect();
        let (loop_index, copy) = system
            .loops
            .iter()
            .enumerate()
            .find_map(|(li, l)| {
                if l.vertices == src {
                    Some((li, LoopCopy::Forward))
                } else if l.vertices.iter().rev().eq(src.iter()) {
                    Some((li, LoopCopy::Reverse))
                } else {
                    None
                }
            })
            .ok_or_else(|| SchemaError::ArcMismatch(format!("boundary run {src:?} is not a loop")))?;
        arcs.push(Arc { loop_index, copy, start, len });
    }
    let word: Vec<(usize, LoopCopy)> = arcs.iter().map(|a| (a.loop_index, a.copy)).collect();
    if !word_pairs_loops(&word, system.loops.len()) {
        return Err(SchemaError::ArcMismatch(format!("arc word {word:?} does not pair the loops")));
    }
    // side 0 is the forward copy of loop 0
    let shift = arcs.iter().position(|a| a.loop_index == 0 && a.copy == LoopCopy::Forward).unwrap();
    arcs.rotate_left(shift);
    let offset = arcs[0].start;
    let mut boundary = cycle.clone();
    boundary.rotate_left(offset);
    for a in &mut arcs {
        a.start = (a.start + n - offset) % n;
    }
    Ok(CutMesh { disk: opened.disk, source: opened.source, origin, genus, boundary, arcs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<(usize, LoopCopy)> {
        s.split_whitespace()
            .map(|t| {
                let (l, c) = if let Some(r) = t.strip_suffix('\'') { (r, LoopCopy::Reverse) } else { (t, LoopCopy::Forward) };
                (l.parse().unwrap(), c)
            })
            .collect()
    }

    #[test]
    fn canonical_words() {
        assert!(is_canonical_word(&w("0 1 0' 1'")));
        assert!(is_canonical_word(&w("1 0' 1' 0")));
        assert!(is_canonical_word(&w("0 1 0' 1' 2 3 2' 3'")));
        assert!(!is_canonical_word(&w("0 0' 1 1'")));
        assert!(is_canonical_word(&w("0 1 2' 1' 2 3 0' 3'")));
        assert!(!is_canonical_word(&w("0 1 2 3 0' 1' 2' 3'")));
    }

    #[test]
    fn corner_classes() {
        assert_eq!(glued_corner_classes(&w("0 1 0' 1'")), 1);
        // sphere-like word aa⁻¹bb⁻¹ leaves three vertex classes
        assert_eq!(glued_corner_classes(&w("0 0' 1 1'")), 3);
        assert_eq!(glued_corner_classes(&w("0 1 0' 1' 2 3 2' 3'")), 1);
        assert_eq!(glued_corner_classes(&w("0 1 2 3 0' 1' 2' 3'")), 1);
    }

    #[test]
    fn pairing() {
        assert!(word_pairs_loops(&w("0 1 0' 1'"), 2));
        assert!(!word_pairs_loops(&w("0 1 0 1'"), 2));
        assert!(!word_pairs_loops(&w("0 1 0'"), 2));
    }
}
