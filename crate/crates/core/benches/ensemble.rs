use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use wsnsim_core::presets::preset;
use wsnsim_core::{run_ensemble_with, Execution, ProtocolKind, ScenarioConfig};

fn ensemble(c: &mut Criterion) {
    let cfg = ScenarioConfig {
        max_rounds: 2000,
        ..preset("paper-case-1").unwrap().base.for_protocol(ProtocolKind::Tsep)
    };
    let seeds: Vec<u64> = (1..=8).collect();

    let mut modes = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    modes.push(("parallel", Execution::Parallel));

    let mut group = c.benchmark_group("ensemble_8_seeds");
    group.sample_size(10);
    for (name, exec) in modes {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_ensemble_with(&cfg, &seeds, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ensemble);
criterion_main!(benches);
