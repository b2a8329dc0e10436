use criterion::{criterion_group, criterion_main, Criterion};
use qbl_core::batch::{replicate_seeds, run_replicates_sequential};
use qbl_core::{Instance, PolicyKind, PolicySpec};

fn bench_replicates(c: &mut Criterion) {
    let instance = Instance::bernoulli(&[0.5, 0.45, 0.4, 0.35]).unwrap();
    let policy = PolicySpec::new(PolicyKind::QueryThenUcbv);
    let seeds = replicate_seeds(0, 16);
    let (horizon, budget) = (20_000, 200);

    let mut group = c.benchmark_group("replicates");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| run_replicates_sequential(&instance, &policy, horizon, budget, &seeds).unwrap())
    });
    #[cfg(feature = "parallel")]
    {
        let threads = std::thread::available_parallelism().map_or(2, |n| n.get()).max(2);
        group.bench_with_input(criterion::BenchmarkId::new("parallel", threads), &threads, |b, &t| {
            b.iter(|| qbl_core::batch::run_replicates_parallel(&instance, &policy, horizon, budget, &seeds, t).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_replicates);
criterion_main!(benches);
