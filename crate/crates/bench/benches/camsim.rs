use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use cvtx_bench::naturals;
use cvtx_core::camsim::{build_tree, simulate, simulate_serial};

fn adder_tree(c: &mut Criterion) {
    let mut group = c.benchmark_group("adder_tree");
    for &(k, n) in &[(16usize, 4u32), (64, 8), (256, 16)] {
        let tree = build_tree(k, n as usize).unwrap();
        let inputs = naturals(k, n, 3);
        group.bench_with_input(BenchmarkId::new("parallel", k), &inputs, |b, xs| {
            b.iter(|| simulate(&tree, black_box(xs)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("serial", k), &inputs, |b, xs| {
            b.iter(|| simulate_serial(&tree, black_box(xs)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, adder_tree);
criterion_main!(benches);
