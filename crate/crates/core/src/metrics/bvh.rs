//! Axis-aligned bounding volume hierarchy for closest-point queries.

use crate::geom::{self, Vec3};
use crate::mesh::TriMesh;

const LEAF_SIZE: usize = 4;

#[derive(Clone, Copy, Debug)]
struct Aabb {
    lo: Vec3,
    hi: Vec3,
}

impl Aabb {
    fn empty() -> Self {
        Aabb { lo: [f64::INFINITY; 3], hi: [f64::NEG_INFINITY; 3] }
    }

    fn grow(&mut self, p: Vec3) {
        for k in 0..3 {
            self.lo[k] = self.lo[k].min(p[k]);
            self.hi[k] = self.hi[k].max(p[k]);
        }
    }

    fn merge(&mut self, o: &Aabb) {
        self.grow(o.lo);
        self.grow(o.hi);
    }

    fn dist2(&self, p: Vec3) -> f64 {
        let mut d = 0.0;
        for k in 0..3 {
            let e = (self.lo[k] - p[k]).max(0.0).max(p[k] - self.hi[k]);
            d += e * e;
        }
        d
    }
}

#[derive(Clone, Debug)]
enum Node {
    Leaf { bounds: Aabb, start: usize, end: usize },
    Inner { bounds: Aabb, left: usize, right: usize },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

/// Immutable after construction; queries take `&self` and may run
/// concurrently.
#[derive(Clone, Debug)]
pub struct Bvh {
    tris: Vec<[Vec3; 3]>,
    nodes: Vec<Node>,
}

impl Bvh {
    pub fn new(mesh: &TriMesh) -> Self {
        let mut items: Vec<([Vec3; 3], Vec3)> = (0..mesh.num_triangles())
            .map(|t| {
                let p = mesh.triangle_positions(t);
                let c = geom::scale(geom::add(geom::add(p[0], p[1]), p[2]), 1.0 / 3.0);
                (p, c)
            })
            .collect();
        let mut nodes = Vec::with_capacity(2 * items.len() / LEAF_SIZE + 1);
        if !items.is_empty() {
            let n = items.len();
            build(&mut items, 0, n, &mut nodes);
        }
        Bvh { tris: items.into_iter().map(|(p, _)| p).collect(), nodes }
    }

    /// Distance from `p` to the closest point of the mesh.
    pub fn distance(&self, p: Vec3) -> f64 {
        if self.nodes.is_empty() {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i];
            if node.bounds().dist2(p) >= best {
                continue;
            }
            match *node {
                Node::Leaf { start, end, .. } => {
                    for [a, b, c] in &self.tris[start..end] {
                        let q = geom::closest_point_on_triangle(p, *a, *b, *c);
                        let d = geom::dot(geom::sub(p, q), geom::sub(p, q));
                        if d < best {
                            best = d;
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    let (dl, dr) = (self.nodes[left].bounds().dist2(p), self.nodes[right].bounds().dist2(p));
                    // visit the nearer child first
                    if dl < dr {
                        stack.push(right);
                        stack.push(left);
                    } else {
                        stack.push(left);
                        stack.push(right);
                    }
                }
            }
        }
        best.sqrt()
    }
}

fn build(items: &mut [([Vec3; 3], Vec3)], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let mut bounds = Aabb::empty();
    let mut centers = Aabb::empty();
    for (p, c) in &items[start..end] {
        for v in p {
            bounds.grow(*v);
        }
        centers.grow(*c);
    }
    let id = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { bounds, start, end });
        return id;
    }
    let ext = geom::sub(centers.hi, centers.lo);
    let axis = (0..3).max_by(|&a, &b| ext[a].total_cmp(&ext[b])).unwrap();
    let mid = (start + end) / 2;
    items[start..end].select_nth_unstable_by(mid - start, |x, y| x.1[axis].total_cmp(&y.1[axis]));
    nodes.push(Node::Leaf { bounds, start, end });
    let left = build(items, start, mid, nodes);
    let right = build(items, mid, end, nodes);
    let mut b = *nodes[left].bounds();
    b.merge(nodes[right].bounds());
    nodes[id] = Node::Inner { bounds: b, left, right };
    id
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn matches_brute_force() {
        let m = synth::torus(12, 8, 2.0, 0.7);
        let bvh = Bvh::new(&m);
        for i in 0..50 {
            let t = i as f64 * 0.37;
            let p = [3.0 * t.cos(), 2.5 * (1.3 * t).sin(), (0.7 * t).cos()];
            let brute = (0..m.num_triangles())
                .map(|k| {
                    let [a, b, c] = m.triangle_positions(k);
                    geom::dist(p, geom::closest_point_on_triangle(p, a, b, c))
                })
                .fold(f64::INFINITY, f64::min);
            assert!((bvh.distance(p) - brute).abs() < 1e-12);
        }
    }
}
