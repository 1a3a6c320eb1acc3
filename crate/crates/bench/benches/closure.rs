use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use onlinefwer::closure::{brute_force_closed, mixed_pvectors, shortcut_run};
use onlinefwer::procedures::{AddisFamily, AddisParams, AlphaSpendingFamily};
use onlinefwer::{GammaSequence, LagStructure};

fn closure_benchmark(c: &mut Criterion) {
    let alpha_spending = AlphaSpendingFamily::new(0.2, GammaSequence::inverse_square()).unwrap();
    let addis = AddisFamily::new(
        0.2,
        GammaSequence::inverse_square(),
        LagStructure::batch(3).unwrap(),
        AddisParams::constant(0.8, 0.3).unwrap(),
    )
    .unwrap();

    let mut group = c.benchmark_group("brute force vs short-cut");
    for n in [4, 8, 12] {
        let p = mixed_pvectors(n, 1, n as u64).remove(0);
        group.bench_with_input(
            BenchmarkId::new("brute-force/alpha-spending", n),
            &p,
            |b, p| b.iter(|| brute_force_closed(&alpha_spending, black_box(p)).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("short-cut/alpha-spending", n),
            &p,
            |b, p| b.iter(|| shortcut_run(&alpha_spending, black_box(p)).unwrap()),
        );
        group.bench_with_input(BenchmarkId::new("brute-force/addis", n), &p, |b, p| {
            b.iter(|| brute_force_closed(&addis, black_box(p)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("short-cut/addis", n), &p, |b, p| {
            b.iter(|| shortcut_run(&addis, black_box(p)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, closure_benchmark);
criterion_main!(benches);
