use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use loopcut::schema::{cut_along, layout_canonical, map_point, polygon_area, polygon_corner, SchemaLayout};
use loopcut::{detach_all, greedy_basis, synth, RefineConfig, TriMesh};

fn schema(mesh: &TriMesh, root: usize) -> SchemaLayout {
    let sys = greedy_basis(mesh, root).unwrap();
    let (m, s, _) = detach_all(mesh, &sys, &RefineConfig::default()).unwrap();
    layout_canonical(&cut_along(&m, &s).unwrap()).unwrap()
}

fn check_layout(l: &SchemaLayout) {
    assert_eq!(l.flipped_triangles(), 0);
    let sides = l.sides();
    for (j, &c) in l.corners.iter().enumerate() {
        let want = polygon_corner(sides, j);
        assert!((l.uv[c][0] - want[0]).abs() < 1e-9 && (l.uv[c][1] - want[1]).abs() < 1e-9);
    }
    assert!((l.total_area() - polygon_area(sides)).abs() < 1e-9);
}

#[test]
fn torus_to_polycube_covers_and_round_trips() {
    let a = schema(&synth::torus(14, 9, 2.0, 0.7), 17);
    let b = schema(&synth::polycube_chain(1, 2).unwrap(), 3);
    check_layout(&a);
    check_layout(&b);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut hit = vec![false; b.num_triangles()];
    let mut worst: f64 = 0.0;
    let mut mapped = 0;
    while mapped < 10_000 {
        let p = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let Some(src) = a.grid().locate(p) else { continue };
        let k = rng.random_range(0..4i64);
        let (t, w) = map_point(&a, &b, src, k).unwrap();
        hit[t] = true;
        let back = map_point(&b, &a, (t, w), -k).unwrap();
        let q = a.point_2d(back.0, back.1);
        worst = worst.max((q[0] - p[0]).hypot(q[1] - p[1]));
        mapped += 1;
    }
    assert!(worst < 1e-6, "round trip error {worst}");
    let covered: f64 = (0..b.num_triangles()).filter(|&t| hit[t]).map(|t| b.signed_area(t)).sum();
    assert!(covered / b.total_area() > 0.95, "covered {}", covered / b.total_area());
}

#[test]
fn layout_survives_save_and_load() {
    let l = schema(&synth::double_torus(1), 0);
    check_layout(&l);
    let dir = tempfile::tempdir().unwrap();
    let (obj, side) = (dir.path().join("l.obj"), dir.path().join("l.json"));
    l.save(&obj, &side).unwrap();
    let r = SchemaLayout::load(&obj, &side).unwrap();
    assert_eq!(r.uv, l.uv);
    assert_eq!(r.triangles, l.triangles);
    assert_eq!(r.corners, l.corners);
    let t = r.num_triangles() / 2;
    assert_eq!(r.point_3d(t, [0.2, 0.3, 0.5]), l.point_3d(t, [0.2, 0.3, 0.5]));
}

#[test]
fn map_rejects_genus_mismatch() {
    let a = schema(&synth::torus(8, 6, 2.0, 0.7), 0);
    let b = schema(&synth::double_torus(1), 0);
    assert!(map_point(&a, &b, (0, [1.0 / 3.0; 3]), 0).is_err());
}
