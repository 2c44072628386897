use proptest::prelude::*;

use loopcut::detach::{find_merging_sites, loops_are_disjoint, OpKind, Strategy};
use loopcut::geom::{self, Vec3};
use loopcut::mesh::{parse_obj, write_obj};
use loopcut::schema::{cut_along, layout_canonical, map_point};
use loopcut::{detach_all, greedy_basis, synth, RefineConfig, TriMesh};

fn strategy() -> impl proptest::strategy::Strategy<Value = Strategy> {
    prop_oneof![Just(Strategy::EdgeSplit), Just(Strategy::VertexSplit), Just(Strategy::Hybrid)]
}

fn test_mesh(kind: u8, a: usize, b: usize) -> TriMesh {
    match kind % 3 {
        0 => synth::torus(6 + a, 5 + b, 2.0, 0.6),
        1 => synth::polycube_chain(1 + a % 5, 1 + b % 2).unwrap(),
        _ => synth::double_torus(1 + a % 2),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn polycube_chain_is_valid_and_axis_aligned(g in 1usize..12, cells in 1usize..4) {
        let m = synth::polycube_chain(g, cells).unwrap();
        m.validate().unwrap();
        prop_assert_eq!(m.genus().unwrap(), g);
        for t in 0..m.num_triangles() {
            let n = m.triangle_cross(t);
            prop_assert_eq!(n.iter().filter(|c| **c != 0.0).count(), 1);
        }
    }

    #[test]
    fn greedy_basis_is_a_cut_graph(kind in 0u8..3, a in 0usize..6, b in 0usize..6, root in any::<prop::sample::Index>()) {
        let m = test_mesh(kind, a, b);
        let root = root.index(m.num_vertices());
        let s = greedy_basis(&m, root).unwrap();
        prop_assert_eq!(s.loops.len(), 2 * m.genus().unwrap());
        prop_assert_eq!(s.origin, root);
        s.validate(&m).unwrap();
    }

    #[test]
    fn detach_gives_disjoint_loops_and_exact_costs(
        kind in 0u8..3, a in 0usize..5, b in 0usize..5,
        root in any::<prop::sample::Index>(), strat in strategy(),
    ) {
        let m = test_mesh(kind, a, b);
        let sys = greedy_basis(&m, root.index(m.num_vertices())).unwrap();
        let cfg = RefineConfig { record_ops: true, ..RefineConfig::with_strategy(strat) };
        let (out, s, r) = detach_all(&m, &sys, &cfg).unwrap();
        out.validate().unwrap();
        prop_assert_eq!(out.genus().unwrap(), m.genus().unwrap());
        s.validate(&out).unwrap();
        prop_assert!(loops_are_disjoint(&s));
        prop_assert!(find_merging_sites(&out, &s).unwrap().is_empty());
        prop_assert_eq!(r.new_vertices, out.num_vertices() - m.num_vertices());
        prop_assert_eq!(r.new_triangles, out.num_triangles() - m.num_triangles());
        prop_assert_eq!(r.new_triangles, 2 * r.new_vertices);
        for op in &r.ops {
            match op.kind {
                OpKind::EdgeSplit => prop_assert_eq!((op.added_vertices, op.added_triangles), (op.fan_edges, 2 * op.fan_edges)),
                _ => prop_assert_eq!((op.added_vertices, op.added_triangles), (1, 2)),
            }
        }
        // old vertices never move
        prop_assert_eq!(&out.positions()[..m.num_vertices()], m.positions());
    }

    #[test]
    fn cut_and_layout_of_detached_system(kind in 0u8..3, a in 0usize..4, b in 0usize..4, root in any::<prop::sample::Index>(), k in -20i64..20, t in any::<prop::sample::Index>()) {
        let m = test_mesh(kind, a, b);
        let sys = greedy_basis(&m, root.index(m.num_vertices())).unwrap();
        let (out, s, _) = detach_all(&m, &sys, &RefineConfig::default()).unwrap();
        let cut = cut_along(&out, &s).unwrap();
        let g = m.genus().unwrap();
        prop_assert_eq!(cut.disk.euler_characteristic(), 1);
        prop_assert_eq!(cut.arcs.len(), 4 * g);
        prop_assert_eq!(cut.glued_corner_classes(), 1);
        let l = layout_canonical(&cut).unwrap();
        prop_assert_eq!(l.flipped_triangles(), 0);
        let t = t.index(l.num_triangles());
        let p = l.point_2d(t, [0.25, 0.25, 0.5]);
        let there = map_point(&l, &l, (t, [0.25, 0.25, 0.5]), k).unwrap();
        let back = map_point(&l, &l, there, -k).unwrap();
        let q = l.point_2d(back.0, back.1);
        prop_assert!((p[0] - q[0]).hypot(p[1] - q[1]) < 1e-6);
    }

    #[test]
    fn obj_round_trip_is_exact(xs in prop::collection::vec(-1e6f64..1e6, 9)) {
        let p: Vec<Vec3> = xs.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        let (q, t) = parse_obj(&write_obj(&p, &[[0, 1, 2]])).unwrap();
        prop_assert_eq!(q, p);
        prop_assert_eq!(t, vec![[0, 1, 2]]);
    }

    #[test]
    fn closest_point_beats_corners(p in prop::array::uniform3(-3.0f64..3.0), v in prop::array::uniform9(-1.0f64..1.0)) {
        let (a, b, c) = ([v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]);
        prop_assume!(geom::norm(geom::triangle_cross(a, b, c)) > 1e-3);
        let q = geom::closest_point_on_triangle(p, a, b, c);
        let d = geom::dist(p, q);
        for x in [a, b, c, geom::midpoint(a, b), geom::midpoint(b, c), geom::scale(geom::add(geom::add(a, b), c), 1.0 / 3.0)] {
            prop_assert!(d <= geom::dist(p, x) + 1e-12);
        }
    }
}
