use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use macbeath::density::patterns::pattern_census;
use macbeath::density::sweep::default_stream;
use macbeath::density::{sweep, SweepOptions};
use macbeath::numkit::PrimeLimit;
use macbeath::par::Exec;

fn execs() -> Vec<(&'static str, Exec)> {
    let mut v = vec![("sequential", Exec::Sequential)];
    if cfg!(feature = "parallel") {
        v.push(("parallel", Exec::Parallel(0)));
    }
    v
}

fn bench_sweep(c: &mut Criterion) {
    let stream = default_stream(3, 7, PrimeLimit::First(400)).unwrap();
    let mut g = c.benchmark_group("sweep_3_7_first_400");
    g.sample_size(10);
    for (name, exec) in execs() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| sweep(3, 7, &stream, &SweepOptions { exec, ..Default::default() }).unwrap())
        });
    }
    g.finish();
}

fn bench_patterns(c: &mut Criterion) {
    let mut g = c.benchmark_group("pattern_census_3_7_20000");
    g.sample_size(10);
    for (name, exec) in execs() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| pattern_census(3, 7, 20_000, exec, None).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_sweep, bench_patterns);
criterion_main!(benches);
