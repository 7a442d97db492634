use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracdiff_bench::robin_problem;
use fracdiff_core::SolverChoice;

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for (nodes, steps) in [(41, 64), (101, 256)] {
        let p = robin_problem(0.5, nodes, steps);
        let label = format!("{nodes}x{steps}");
        group.bench_with_input(BenchmarkId::new("spectral", &label), &p, |b, p| {
            b.iter(|| SolverChoice::spectral().solve(black_box(p)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("l1", &label), &p, |b, p| {
            b.iter(|| SolverChoice::L1.solve(black_box(p)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, solvers);
criterion_main!(benches);
