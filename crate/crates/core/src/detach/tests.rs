use super::*;
use crate::basis::greedy_basis;
use crate::synth;

fn check_costs(report: &RefinementReport) {
    for op in &report.ops {
        match op.kind {
            OpKind::VertexSplit | OpKind::TriangleSplit => assert_eq!((op.added_vertices, op.added_triangles), (1, 2)),
            OpKind::EdgeSplit => assert_eq!((op.added_vertices, op.added_triangles), (op.fan_edges, 2 * op.fan_edges)),
        }
    }
}

fn run(mesh: &TriMesh, root: usize, strategy: Strategy) -> (TriMesh, LoopSystem, RefinementReport) {
    let system = greedy_basis(mesh, root).unwrap();
    let config = RefineConfig { record_ops: true, ..RefineConfig::with_strategy(strategy) };
    let out = detach_all(mesh, &system, &config).unwrap();
    out.0.validate().unwrap();
    out.1.validate(&out.0).unwrap();
    assert!(loops_are_disjoint(&out.1), "{strategy:?}");
    assert!(find_merging_sites(&out.0, &out.1).unwrap().is_empty());
    check_costs(&out.2);
    out
}

#[test]
fn torus_all_strategies() {
    let m = synth::torus(10, 7, 2.0, 0.6);
    for s in [Strategy::EdgeSplit, Strategy::VertexSplit, Strategy::TriangleSplit, Strategy::Hybrid] {
        for root in [0, 13, 41] {
            run(&m, root, s);
        }
    }
}

#[test]
fn double_torus_all_strategies() {
    let m = synth::double_torus(2);
    for s in [Strategy::EdgeSplit, Strategy::VertexSplit, Strategy::TriangleSplit, Strategy::Hybrid] {
        let (_, sys, report) = run(&m, 5, s);
        assert_eq!(sys.loops.len(), 4);
        assert_eq!(report.operations(), report.ops.len());
    }
}

#[test]
fn vertex_split_cost_model() {
    let m = synth::polycube_chain(3, 2).unwrap();
    let (out, _, r) = run(&m, 0, Strategy::VertexSplit);
    assert_eq!(r.new_triangles, 2 * r.new_vertices);
    assert_eq!(r.new_vertices, out.num_vertices() - m.num_vertices());
    assert_eq!(r.vertex_splits, r.operations());
}

#[test]
fn sphere_has_nothing_to_do() {
    let m = synth::icosphere(1);
    let sys = greedy_basis(&m, 0).unwrap();
    let (out, _, r) = detach_all(&m, &sys, &RefineConfig::default()).unwrap();
    assert_eq!(out.num_vertices(), m.num_vertices());
    assert_eq!(r.operations(), 0);
}

#[test]
fn sites_report_common_outgoing_edge() {
    let m = synth::torus(10, 7, 2.0, 0.6);
    let sys = greedy_basis(&m, 0).unwrap();
    for s in find_merging_sites(&m, &sys).unwrap() {
        assert!(s.bundles.len() >= 2);
        assert_ne!(s.vertex, sys.origin);
        assert!(m.has_edge(s.vertex, s.out));
        for b in &s.bundles {
            assert_ne!(b.from, s.out);
        }
    }
}

#[test]
fn coincident_loops_rejected() {
    let m = synth::torus(10, 7, 2.0, 0.6);
    let mut sys = greedy_basis(&m, 0).unwrap();
    sys.loops[1] = sys.loops[0].clone();
    assert!(matches!(Detacher::new(m, &sys), Err(DetachError::CoincidentLoops(0, 1))));
}

#[test]
fn operation_limit_aborts() {
    let m = synth::polycube_chain(2, 2).unwrap();
    let sys = greedy_basis(&m, 0).unwrap();
    let cfg = RefineConfig { max_operations: Some(1), ..Default::default() };
    assert!(matches!(detach_all(&m, &sys, &cfg), Err(DetachError::OperationLimit(1))));
}

#[test]
fn memory_cap_aborts() {
    let m = synth::polycube_chain(2, 2).unwrap();
    let sys = greedy_basis(&m, 0).unwrap();
    let cfg = RefineConfig { mem_cap_bytes: Some(1), ..Default::default() };
    assert!(matches!(detach_all(&m, &sys, &cfg), Err(DetachError::MemoryCap { cap: 1, .. })));
}

#[test]
fn config_validation() {
    assert!(RefineConfig { lambda_init: 1.0, ..Default::default() }.validate().is_err());
    assert!(RefineConfig { planarity_threshold_deg: -1.0, ..Default::default() }.validate().is_err());
    assert!(RefineConfig::default().validate().is_ok());
    assert_eq!("hybrid".parse::<Strategy>(), Ok(Strategy::Hybrid));
    assert!("spline".parse::<Strategy>().is_err());
}

#[test]
fn single_step_wrappers() {
    let m = synth::torus(10, 7, 2.0, 0.6);
    let sys = greedy_basis(&m, 0).unwrap();
    let site = find_merging_sites(&m, &sys).unwrap().remove(0);
    let (mut m1, mut s1) = (m.clone(), sys.clone());
    let r = detach_vertex_split(&mut m1, &mut s1, &site, Rotation::Ccw, 0.75).unwrap();
    assert_eq!((r.added_vertices, r.added_triangles), (1, 2));
    s1.validate(&m1).unwrap();
    let (mut m2, mut s2) = (m.clone(), sys.clone());
    if site.fan(&m2, Rotation::Cw).unwrap().spokes.is_empty() {
        return;
    }
    let r = detach_edge_split(&mut m2, &mut s2, &site, Rotation::Cw).unwrap();
    assert_eq!(r.added_triangles, 2 * r.added_vertices);
    s2.validate(&m2).unwrap();
}
