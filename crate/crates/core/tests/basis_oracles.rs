use loopcut::basis::{globally_shortest_basis, greedy_basis, greedy_basis_detailed, shortest_path_tree};
use loopcut::{synth, Execution, TriMesh};

/// Plain Bellman-Ford over the undirected edge list.
fn bellman_ford(mesh: &TriMesh, root: usize) -> Vec<f64> {
    let edges: Vec<(usize, usize, f64)> = mesh
        .edges()
        .into_iter()
        .map(|e| {
            let (a, b) = e.endpoints();
            (a, b, mesh.edge_length(a, b))
        })
        .collect();
    let mut d = vec![f64::INFINITY; mesh.num_vertices()];
    d[root] = 0.0;
    for _ in 0..mesh.num_vertices() {
        let mut changed = false;
        for &(a, b, w) in &edges {
            if d[a] + w < d[b] {
                d[b] = d[a] + w;
                changed = true;
            }
            if d[b] + w < d[a] {
                d[a] = d[b] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    d
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn meshes() -> Vec<(&'static str, TriMesh)> {
    vec![
        ("torus", synth::torus(9, 6, 2.0, 0.7)),
        ("double torus", synth::double_torus(1)),
        ("polycube", synth::polycube_chain(3, 1).unwrap()),
        ("smoothed polycube", synth::smooth(&synth::polycube_chain(2, 2).unwrap(), 3, 0.3)),
    ]
}

#[test]
fn tree_distances_match_bellman_ford() {
    for (name, m) in meshes() {
        for root in [0, m.num_vertices() / 2, m.num_vertices() - 1] {
            let (dist, parent) = shortest_path_tree(&m, root);
            let bf = bellman_ford(&m, root);
            for v in 0..m.num_vertices() {
                assert!(close(dist[v], bf[v]), "{name} root {root} vertex {v}: {} vs {}", dist[v], bf[v]);
                if let Some(p) = parent[v] {
                    assert!(close(dist[p] + m.edge_length(p, v), dist[v]));
                }
            }
        }
    }
}

#[test]
fn loop_length_is_tree_distance_plus_edge() {
    for (name, m) in meshes() {
        let g = m.genus().unwrap();
        for root in [1, m.num_vertices() / 3] {
            let gb = greedy_basis_detailed(&m, root).unwrap();
            let bf = bellman_ford(&m, root);
            assert_eq!(gb.system.loops.len(), 2 * g, "{name}");
            for (l, e) in gb.system.loops.iter().zip(&gb.generators) {
                let (u, v) = e.endpoints();
                let want = bf[u] + m.edge_length(u, v) + bf[v];
                let walked: f64 = l.vertices.windows(2).map(|w| m.edge_length(w[0], w[1])).sum();
                assert!(close(l.length, want), "{name}: {} vs {want}", l.length);
                assert!(close(walked, want));
                assert!(l.edges().any(|x| x == *e));
            }
            gb.system.validate(&m).unwrap();
        }
    }
}

#[test]
fn global_basis_is_minimum_over_roots() {
    for (name, m) in [("torus", synth::torus(7, 5, 2.0, 0.8)), ("double torus", synth::double_torus(1))] {
        let brute = (0..m.num_vertices())
            .map(|r| greedy_basis(&m, r).unwrap().total_length())
            .fold(f64::INFINITY, f64::min);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let global = globally_shortest_basis(&m, 5_000, exec).unwrap();
            assert!(close(global.total_length(), brute), "{name}: {} vs {brute}", global.total_length());
            global.validate(&m).unwrap();
        }
    }
}

#[test]
fn sphere_and_genus_two_loop_counts() {
    assert!(greedy_basis(&synth::tetrahedron(), 0).unwrap().loops.is_empty());
    assert!(greedy_basis(&synth::icosphere(2), 7).unwrap().loops.is_empty());
    assert_eq!(greedy_basis(&synth::double_torus(2), 0).unwrap().loops.len(), 4);
}
