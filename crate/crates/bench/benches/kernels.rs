use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracdiff_bench::negative_points;
use fracdiff_core::fractional_calculus::{caputo_l1, rl_integral};
use fracdiff_core::mittag_leffler::{KernelFamily, MittagLeffler, MlTable};
use fracdiff_core::{MLParams, TimeGrid, TimeSignal};

fn mittag_leffler(c: &mut Criterion) {
    let zs = negative_points(256, 200.0);
    let mut group = c.benchmark_group("mittag_leffler");
    for alpha in [0.3, 0.7] {
        let ml = MittagLeffler::new(MLParams::new(alpha, alpha).unwrap());
        group.bench_with_input(BenchmarkId::new("direct", alpha), &zs, |b, zs| {
            b.iter(|| zs.iter().map(|&z| ml.eval(black_box(z)).unwrap()).sum::<f64>())
        });
        let table = MlTable::new(ml.clone()).unwrap();
        group.bench_with_input(BenchmarkId::new("table", alpha), &zs, |b, zs| {
            b.iter(|| zs.iter().map(|&z| table.eval(black_box(z)).unwrap()).sum::<f64>())
        });
    }
    group.bench_function("kernel_family", |b| b.iter(|| KernelFamily::tabulated(black_box(0.5)).unwrap()));
    group.finish();
}

fn operators(c: &mut Criterion) {
    let mut group = c.benchmark_group("fractional_operators");
    for steps in [256, 1024] {
        let grid = TimeGrid::graded_for(1.0, steps, 0.5).unwrap();
        let f = TimeSignal::from_fn(&grid, |t| t.sqrt() + t.sin());
        group.bench_with_input(BenchmarkId::new("rl_integral", steps), &f, |b, f| {
            b.iter(|| rl_integral(black_box(f), 0.5).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("caputo_l1", steps), &f, |b, f| {
            b.iter(|| caputo_l1(black_box(f), 0.5).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, mittag_leffler, operators);
criterion_main!(benches);
