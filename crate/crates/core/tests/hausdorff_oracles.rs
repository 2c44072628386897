use loopcut::metrics::{hausdorff, sample_surface};
use loopcut::{synth, Execution, TriMesh};

fn scaled(m: &TriMesh, s: f64, shift: [f64; 3]) -> TriMesh {
    let p = m.positions().iter().map(|p| [s * p[0] + shift[0], s * p[1] + shift[1], s * p[2] + shift[2]]).collect();
    TriMesh::new(p, m.triangles().to_vec()).unwrap()
}

fn unit_cube() -> TriMesh {
    let p = (0..8).map(|i| [(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]).collect();
    let quads = [[0, 2, 3, 1], [4, 5, 7, 6], [0, 1, 5, 4], [2, 6, 7, 3], [0, 4, 6, 2], [1, 3, 7, 5]];
    let t = quads.iter().flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]]).collect();
    TriMesh::new(p, t).unwrap()
}

// Two homothetic polyhedra inscribed in concentric spheres: every point p of
// the inner one has s·p on the outer at distance (s - 1)|p| <= s - 1, with
// equality at the vertices, so H = s - 1 exactly.
#[test]
fn concentric_spheres() {
    let inner = synth::icosphere(2);
    for s in [1.01, 1.1, 1.5] {
        let outer = scaled(&inner, s, [0.0; 3]);
        let h = hausdorff(&inner, &outer, 4.0, 3, Execution::Parallel).unwrap();
        let want = (s - 1.0) / inner.bbox_diagonal();
        assert!((h.max - want).abs() < 1e-12, "{s}: {} vs {want}", h.max);
        assert!(h.avg > 0.0 && h.avg <= h.max);
    }
}

// A box translated by d: every point moves by d and the vertices realise it.
#[test]
fn translated_cube() {
    let a = unit_cube();
    let d = 0.125;
    let b = scaled(&a, 1.0, [d, 0.0, 0.0]);
    let h = hausdorff(&a, &b, 20.0, 11, Execution::Sequential).unwrap();
    assert!((h.max - d / 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn sequential_and_parallel_agree() {
    let a = synth::torus(16, 10, 2.0, 0.6);
    let b = synth::smooth(&a, 2, 0.5);
    let s = hausdorff(&a, &b, 10.0, 5, Execution::Sequential).unwrap();
    let p = hausdorff(&a, &b, 10.0, 5, Execution::Parallel).unwrap();
    assert_eq!(s, p);
}

#[test]
fn sample_count_follows_density() {
    let m = synth::polycube_chain(2, 2).unwrap();
    for density in [1.0, 10.0] {
        let n = sample_surface(&m, density, 1).len() - m.num_vertices();
        let expect = density * m.num_triangles() as f64;
        assert!((n as f64 - expect).abs() <= 0.1 * expect + 5.0, "{n} vs {expect}");
    }
}
