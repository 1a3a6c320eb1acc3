use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use onlinefwer::procedures::ProcedureSpec;
use onlinefwer::simulation::{generate_trial, run_trial, SimConfig};
use onlinefwer::ProcedureId;

fn simulation_benchmark(c: &mut Criterion) {
    let mut group = c.benchmark_group("trial");
    for b in [1, 10, 100] {
        let config = SimConfig {
            n: 1000,
            batch_size: b,
            ..SimConfig::desk_scale(1)
        };
        group.bench_with_input(BenchmarkId::new("generate", b), &config, |bench, config| {
            bench.iter(|| generate_trial(config, black_box(3)).unwrap())
        });
        group.bench_with_input(
            BenchmarkId::new("generate+addis pair", b),
            &config,
            |bench, config| {
                let procs = [ProcedureSpec::Addis, ProcedureSpec::ClosedAddis];
                bench.iter(|| run_trial(config, &procs, black_box(3)).unwrap())
            },
        );
    }
    group.finish();

    let config = SimConfig {
        n: 1000,
        batch_size: 10,
        ..SimConfig::desk_scale(1)
    };
    let trial = generate_trial(&config, 0).unwrap();
    let settings = config.settings().unwrap();
    let mut group = c.benchmark_group("procedure over 1000 p-values");
    for id in ProcedureId::ALL {
        let spec = ProcedureSpec::from_id(id);
        group.bench_function(id.name(), |bench| {
            bench.iter(|| {
                spec.build(&settings)
                    .unwrap()
                    .run(black_box(&trial.pvalues))
                    .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, simulation_benchmark);
criterion_main!(benches);
