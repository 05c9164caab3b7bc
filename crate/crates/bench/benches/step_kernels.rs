use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use fqnm_bench::{AdvectionFixture, BurgersFixture};

const SIZES: [usize; 3] = [1 << 10, 1 << 14, 1 << 18];

fn burgers_steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("burgers_step");
    for n in SIZES {
        group.throughput(Throughput::Elements(n as u64));
        let mut fx = BurgersFixture::new(n, 0.8).unwrap();
        group.bench_with_input(BenchmarkId::new("fqnm", n), &n, |b, _| {
            b.iter(|| fx.kernel.step(black_box(&mut fx.states), &mut fx.scratch).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("upwind", n), &n, |b, _| {
            b.iter(|| fx.upwind.step(black_box(&mut fx.values)))
        });
    }
    group.finish();
}

fn weno_steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("advection_step");
    for n in SIZES {
        group.throughput(Throughput::Elements(n as u64));
        let mut fx = AdvectionFixture::new(n, 0.5).unwrap();
        group.bench_with_input(BenchmarkId::new("weno5rk3", n), &n, |b, _| {
            b.iter(|| fx.weno.step(black_box(&mut fx.values)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, burgers_steps, weno_steps);
criterion_main!(benches);
