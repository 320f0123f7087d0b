use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use whitehead_core::graph::{cheeger_exact, random_cubic_graph};
use whitehead_core::oracle::{Metric, MoveGraph};
use whitehead_core::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn cheeger(c: &mut Criterion) {
    let g = random_cubic_graph(12, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let mut group = c.benchmark_group("cheeger_exact_18_edges");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| cheeger_exact(black_box(g.graph()), exec).unwrap()));
    }
    group.finish();
}

fn move_graph(c: &mut Criterion) {
    let mut group = c.benchmark_group("move_graph_w_n6");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| MoveGraph::build(black_box(6), Metric::W, exec).unwrap()));
    }
    group.finish();

    let g = MoveGraph::build(6, Metric::W, Execution::Parallel).unwrap();
    let mut group = c.benchmark_group("diameter_w_n6");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| g.diameter(exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, cheeger, move_graph);
criterion_main!(benches);
