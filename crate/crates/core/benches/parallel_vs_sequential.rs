use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use loopcut::bench::{growth_bench, GrowthConfig};
use loopcut::metrics::hausdorff;
use loopcut::{detach_all, globally_shortest_basis, greedy_basis, synth, Execution, RefineConfig, Strategy};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_hausdorff(c: &mut Criterion) {
    let a = synth::polycube_chain(8, 3).unwrap();
    let sys = greedy_basis(&a, 0).unwrap();
    let (b, _, _) = detach_all(&a, &sys, &RefineConfig::with_strategy(Strategy::VertexSplit)).unwrap();
    let mut g = c.benchmark_group("hausdorff");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |bench| {
            bench.iter(|| hausdorff(black_box(&a), black_box(&b), 10.0, 1, exec).unwrap())
        });
    }
    g.finish();
}

fn bench_global_basis(c: &mut Criterion) {
    let m = synth::torus(20, 12, 2.0, 0.7);
    let mut g = c.benchmark_group("global_basis");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |bench| {
            bench.iter(|| globally_shortest_basis(black_box(&m), 5_000, exec).unwrap())
        });
    }
    g.finish();
}

fn bench_growth(c: &mut Criterion) {
    let cfg = GrowthConfig { genus_max: 10, ..Default::default() };
    let mut g = c.benchmark_group("growth_sweep");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |bench| bench.iter(|| growth_bench(black_box(&cfg), exec)));
    }
    g.finish();
}

criterion_group!(benches, bench_hausdorff, bench_global_basis, bench_growth);
criterion_main!(benches);
