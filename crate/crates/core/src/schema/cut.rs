//! Cutting a closed mesh open along a set of edges.

use crate::mesh::TriMesh;

/// A mesh cut open along an edge set. Triangle `t` of `disk` is triangle `t`
/// of the source mesh with its corners re-indexed to per-wedge vertex copies.
#[derive(Clone, Debug)]
pub struct OpenedMesh {
    pub disk: TriMesh,
    /// Disk vertex → source mesh vertex.
    pub source: Vec<usize>,
}

impl OpenedMesh {
    pub fn euler_characteristic(&self) -> i64 {
        self.disk.euler_characteristic()
    }

    /// Directed boundary edges chained into cycles. Each cycle follows the
    /// triangle orientation, so the interior lies to its left.
    pub fn boundary_cycles(&self) -> Vec<Vec<usize>> {
        boundary_cycles(&self.disk)
    }

    /// χ = 1 with exactly one boundary cycle.
    pub fn is_disk(&self) -> bool {
        self.disk.connected_components() == 1
            && self.euler_characteristic() == 1
            && self.boundary_cycles().len() == 1
    }
}

pub(crate) fn boundary_cycles(mesh: &TriMesh) -> Vec<Vec<usize>> {
    let n = mesh.num_vertices();
    let mut next: Vec<Vec<usize>> = vec![Vec::new(); n];
    for tri in mesh.triangles() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if mesh.directed_edge_triangle(b, a).is_none() {
                next[a].push(b);
            }
        }
    }
    let mut cycles = Vec::new();
    let mut used: Vec<usize> = vec![0; n];
    for s in 0..n {
        while used[s] < next[s].len() {
            let mut cycle = vec![s];
            let mut cur = s;
            loop {
                let k = used[cur];
                if k >= next[cur].len() {
                    break;
                }
                used[cur] += 1;
                cur = next[cur][k];
                if cur == s {
                    break;
                }
                cycle.push(cur);
            }
            cycles.push(cycle);
        }
    }
    cycles
}

/// Cuts `mesh` along every edge for which `is_cut(a, b)` holds. Each vertex
/// is duplicated once per wedge of triangles between consecutive cut edges
/// around it.
pub fn cut_open(mesh: &TriMesh, is_cut: impl Fn(usize, usize) -> bool) -> OpenedMesh {
    let mut corner = vec![[usize::MAX; 3]; mesh.num_triangles()];
    let mut positions = Vec::with_capacity(mesh.num_vertices());
    let mut source = Vec::with_capacity(mesh.num_vertices());
    for v in 0..mesh.num_vertices() {
        let (ring, ring_tris) = mesh.one_ring(v);
        let d = ring_tris.len();
        let cuts: Vec<usize> = (0..d).filter(|&i| is_cut(v, ring[i])).collect();
        let mut assign = |t: usize, copy: usize| {
            let k = mesh.triangle(t).iter().position(|&x| x == v).unwrap();
            corner[t][k] = copy;
        };
        if cuts.is_empty() {
            let copy = positions.len();
            positions.push(mesh.position(v));
            source.push(v);
            for &t in &ring_tris {
                assign(t, copy);
            }
            continue;
        }
        for (ci, &start) in cuts.iter().enumerate() {
            let end = cuts[(ci + 1) % cuts.len()];
            let copy = positions.len();
            positions.push(mesh.position(v));
            source.push(v);
            // triangles ring_tris[start], ..., ring_tris[end - 1] (cyclic)
            let mut i = start;
            loop {
                assign(ring_tris[i], copy);
                i = (i + 1) % d;
                if i == end {
                    break;
                }
            }
        }
    }
    let disk = TriMesh::new_unchecked(positions, corner).expect("cut mesh indices are in range");
    OpenedMesh { disk, source }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn no_cut_keeps_closed_surface() {
        let m = synth::torus(6, 5, 2.0, 0.5);
        let o = cut_open(&m, |_, _| false);
        assert_eq!(o.disk.num_vertices(), m.num_vertices());
        assert!(o.boundary_cycles().is_empty());
        assert!(!o.is_disk());
    }

    #[test]
    fn torus_meridian_and_longitude_give_disk() {
        let (nu, nv) = (6, 5);
        let m = synth::torus(nu, nv, 2.0, 0.5);
        // vertex (i, j) = i * nv + j; meridian j = 0 ring, longitude i = 0 ring
        let on_cut = |a: usize, b: usize| {
            let (ia, ja, ib, jb) = (a / nv, a % nv, b / nv, b % nv);
            (ja == 0 && jb == 0) || (ia == 0 && ib == 0)
        };
        let o = cut_open(&m, on_cut);
        assert!(o.is_disk());
        assert_eq!(o.source.iter().filter(|&&s| s == 0).count(), 4);
        assert_eq!(o.boundary_cycles()[0].len(), 2 * (nu + nv));
    }
}
