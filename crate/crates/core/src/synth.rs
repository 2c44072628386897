//! Parametric test meshes: tetrahedron, torus grid, icosphere, and genus-g
//! polycube chains (a row of square frames sharing walls).

use std::collections::HashMap;

use thiserror::Error;

use crate::geom::{self, Vec3};
use crate::mesh::TriMesh;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("parameter {name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: usize },
}

pub fn tetrahedron() -> TriMesh {
    let p = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let t = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
    TriMesh::new(p, t).expect("tetrahedron is a valid closed mesh")
}

/// Regular `nu × nv` grid on a torus of radii `major`, `minor`.
pub fn torus(nu: usize, nv: usize, major: f64, minor: f64) -> TriMesh {
    assert!(nu >= 3 && nv >= 3);
    let mut p = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = std::f64::consts::TAU * i as f64 / nu as f64;
        for j in 0..nv {
            let v = std::f64::consts::TAU * j as f64 / nv as f64;
            let rr = major + minor * v.cos();
            p.push([rr * u.cos(), rr * u.sin(), minor * v.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut t = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            t.push([a, b, c]);
            t.push([a, c, d]);
        }
    }
    TriMesh::new(p, t).expect("torus grid is a valid closed mesh")
}

/// Subdivided icosahedron projected on the unit sphere.
pub fn icosphere(levels: usize) -> TriMesh {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut p: Vec<Vec3> = vec![
        [-1.0, g, 0.0], [1.0, g, 0.0], [-1.0, -g, 0.0], [1.0, -g, 0.0],
        [0.0, -1.0, g], [0.0, 1.0, g], [0.0, -1.0, -g], [0.0, 1.0, -g],
        [g, 0.0, -1.0], [g, 0.0, 1.0], [-g, 0.0, -1.0], [-g, 0.0, 1.0],
    ];
    let mut t: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..levels {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(t.len() * 4);
        let mut m = |a: usize, b: usize, p: &mut Vec<Vec3>| {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                p.push(geom::midpoint(p[a], p[b]));
                p.len() - 1
            })
        };
        for &[a, b, c] in &t {
            let ab = m(a, b, &mut p);
            let bc = m(b, c, &mut p);
            let ca = m(c, a, &mut p);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        t = next;
    }
    for q in &mut p {
        *q = geom::scale(*q, 1.0 / geom::norm(*q));
    }
    TriMesh::new(p, t).expect("icosphere is a valid closed mesh")
}

/// Whether voxel `(x, y)` of a genus-`genus` frame chain is solid. The solid
/// is `(2g+1) × 3 × 1` cells with holes at odd `x`, `y = 1`.
fn chain_solid(genus: usize, x: i64, y: i64, z: i64) -> bool {
    let nx = 2 * genus as i64 + 1;
    (0..nx).contains(&x) && (0..3).contains(&y) && z == 0 && !(x % 2 == 1 && y == 1)
}

/// Axis-aligned polycube made of `genus` square frames in a row. Every unit
/// voxel face is subdivided into `cells_per_edge²` squares, each split along
/// the same diagonal.
pub fn polycube_chain(genus: usize, cells_per_edge: usize) -> Result<TriMesh, SynthError> {
    if genus == 0 {
        return Err(SynthError::OutOfRange { name: "genus", value: genus });
    }
    if cells_per_edge == 0 {
        return Err(SynthError::OutOfRange { name: "cells_per_edge", value: cells_per_edge });
    }
    let c = cells_per_edge as i64;
    let mut index: HashMap<[i64; 3], usize> = HashMap::new();
    let mut positions: Vec<Vec3> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut vid = |k: [i64; 3], positions: &mut Vec<Vec3>| {
        *index.entry(k).or_insert_with(|| {
            let s = c as f64;
            positions.push([k[0] as f64 / s, k[1] as f64 / s, k[2] as f64 / s]);
            positions.len() - 1
        })
    };
    let nx = 2 * genus as i64 + 1;
    for x in 0..nx {
        for y in 0..3 {
            let z = 0;
            if !chain_solid(genus, x, y, z) {
                continue;
            }
            for axis in 0..3 {
                for sign in [1i64, -1] {
                    let mut nb = [x, y, z];
                    nb[axis] += sign;
                    if chain_solid(genus, nb[0], nb[1], nb[2]) {
                        continue;
                    }
                    // tangent axes with u × w = sign · e_axis
                    let (mut u, mut w) = ((axis + 1) % 3, (axis + 2) % 3);
                    if sign < 0 {
                        std::mem::swap(&mut u, &mut w);
                    }
                    let mut base = [x * c, y * c, z * c];
                    if sign > 0 {
                        base[axis] += c;
                    }
                    for i in 0..c {
                        for j in 0..c {
                            let corner = |di: i64, dj: i64| {
                                let mut k = base;
                                k[u] += i + di;
                                k[w] += j + dj;
                                k
                            };
                            let p00 = vid(corner(0, 0), &mut positions);
                            let p10 = vid(corner(1, 0), &mut positions);
                            let p11 = vid(corner(1, 1), &mut positions);
                            let p01 = vid(corner(0, 1), &mut positions);
                            triangles.push([p00, p10, p11]);
                            triangles.push([p00, p11, p01]);
                        }
                    }
                }
            }
        }
    }
    Ok(TriMesh::new(positions, triangles).expect("polycube chain is a valid closed mesh"))
}

/// Uniform Laplacian smoothing, `iterations` steps of size `step`.
pub fn smooth(mesh: &TriMesh, iterations: usize, step: f64) -> TriMesh {
    let mut out = mesh.clone();
    let n = out.num_vertices();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in mesh.edges() {
        let (a, b) = e.endpoints();
        nbrs[a].push(b);
        nbrs[b].push(a);
    }
    for _ in 0..iterations {
        let cur = out.positions().to_vec();
        for v in 0..n {
            let mut avg = [0.0; 3];
            for &w in &nbrs[v] {
                avg = geom::add(avg, cur[w]);
            }
            avg = geom::scale(avg, 1.0 / nbrs[v].len() as f64);
            out.set_position(v, geom::lerp(cur[v], avg, step));
        }
    }
    out
}

/// A smooth genus-2 surface: a two-hole polycube chain after smoothing.
pub fn double_torus(cells_per_edge: usize) -> TriMesh {
    let m = polycube_chain(2, cells_per_edge).expect("valid parameters");
    smooth(&m, 8, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signed_volume(m: &TriMesh) -> f64 {
        m.triangles()
            .iter()
            .map(|&[a, b, c]| geom::dot(m.position(a), geom::cross(m.position(b), m.position(c))) / 6.0)
            .sum()
    }

    #[test]
    fn generators_are_outward_oriented() {
        assert!(signed_volume(&tetrahedron()) > 0.0);
        assert!(signed_volume(&torus(8, 6, 2.0, 0.5)) > 0.0);
        assert!(signed_volume(&icosphere(2)) > 0.0);
        assert!(signed_volume(&polycube_chain(3, 2).unwrap()) > 0.0);
    }

    #[test]
    fn polycube_genus_matches_request() {
        for g in [1, 2, 3, 7] {
            for c in [1, 2, 3] {
                let m = polycube_chain(g, c).unwrap();
                m.validate().unwrap();
                assert_eq!(m.genus().unwrap(), g, "g={g} c={c}");
            }
        }
    }

    #[test]
    fn polycube_genus_fifty() {
        assert_eq!(polycube_chain(50, 1).unwrap().genus().unwrap(), 50);
    }

    #[test]
    fn polycube_normals_are_axis_parallel() {
        let m = polycube_chain(4, 2).unwrap();
        for t in 0..m.num_triangles() {
            let n = m.triangle_cross(t);
            let nonzero = n.iter().filter(|c| **c != 0.0).count();
            assert_eq!(nonzero, 1, "triangle {t} normal {n:?}");
        }
    }

    #[test]
    fn polycube_size_linear_in_genus() {
        let v: Vec<usize> = (1..=4).map(|g| polycube_chain(g, 2).unwrap().num_vertices()).collect();
        let d: Vec<usize> = v.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(d.iter().all(|&x| x == d[0]), "{v:?}");
    }

    #[test]
    fn polycube_rejects_bad_parameters() {
        assert!(polycube_chain(0, 2).is_err());
        assert!(polycube_chain(2, 0).is_err());
    }

    #[test]
    fn double_torus_is_genus_two() {
        let m = double_torus(3);
        m.validate().unwrap();
        assert_eq!(m.genus().unwrap(), 2);
    }
}
