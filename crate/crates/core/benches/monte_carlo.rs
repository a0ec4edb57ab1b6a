use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ergoq::exec::map_replicas_seq;
use ergoq::processes::{Process, ProcessSpec};
use std::hint::black_box;

fn process(kind: &str) -> Process {
    ProcessSpec::new(kind.parse().unwrap(), 7).build().unwrap()
}

fn block_means(c: &mut Criterion) {
    let cases = [("bernoulli", process("iid-bernoulli:0.5"), 100usize), ("odometer", process("odometer:64"), 1024)];
    let replicas = 4096;
    let mut group = c.benchmark_group("block_summaries");
    group.throughput(Throughput::Elements(replicas as u64));
    for (name, p, n) in &cases {
        group.bench_with_input(BenchmarkId::new("sequential", name), p, |b, p| {
            b.iter(|| map_replicas_seq(replicas, |r| p.block_summary(r as u64, *n, 0.75).unwrap().mean))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", name), p, |b, p| {
            b.iter(|| ergoq::exec::map_replicas_par(replicas, |r| p.block_summary(r as u64, *n, 0.75).unwrap().mean))
        });
    }
    group.finish();
}

fn coupling(c: &mut Criterion) {
    let p = process("odometer:64");
    let mut group = c.benchmark_group("coupling_study");
    group.sample_size(20);
    group.bench_function("odometer_s0.75_100_replicas", |b| {
        b.iter(|| ergoq::estimators::coupling_study(black_box(&p), 0.75, 10.0, 10_000, 100).unwrap().coupled)
    });
    group.finish();
}

criterion_group!(benches, block_means, coupling);
criterion_main!(benches);
