use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use replynet_core::analysis::{run_full_analysis, AnalysisConfig};
use replynet_core::metrics::{betweenness, hits, HitsConfig};
use replynet_core::oracle::random_graph;
use replynet_core::synth::{generate_course, SynthParams};

fn bench_betweenness(c: &mut Criterion) {
    let mut group = c.benchmark_group("betweenness");
    for &n in &[50usize, 150, 300] {
        let graph = random_graph(7, n, 0.05);
        group.bench_with_input(BenchmarkId::from_parameter(n), &graph, |b, g| {
            b.iter(|| betweenness(g))
        });
    }
    group.finish();
}

fn bench_hits(c: &mut Criterion) {
    let mut group = c.benchmark_group("hits");
    let config = HitsConfig::default();
    for &n in &[50usize, 300, 1000] {
        let graph = random_graph(11, n, 0.02);
        group.bench_with_input(BenchmarkId::from_parameter(n), &graph, |b, g| {
            b.iter(|| hits(g, &config).unwrap())
        });
    }
    group.finish();
}

fn bench_full_pipeline(c: &mut Criterion) {
    let course = generate_course(&SynthParams {
        seed: 42,
        n_students: 200,
        ..SynthParams::default()
    })
    .unwrap();
    let config = AnalysisConfig::default();
    c.bench_function("full_analysis_200_students", |b| {
        b.iter(|| run_full_analysis(&course, &config))
    });
}

criterion_group!(benches, bench_betweenness, bench_hits, bench_full_pipeline);
criterion_main!(benches);
