use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use modsurf::{distance_stats, sample_points, SamplerConfig, SubgroupSpec};

fn stats(c: &mut Criterion) {
    let mut group = c.benchmark_group("distance_stats");
    group.sample_size(10);
    for spec in [SubgroupSpec::full(), SubgroupSpec::principal(2).unwrap()] {
        for n in [64, 256] {
            let pts = sample_points(&spec, n, &SamplerConfig::default(), 1).unwrap();
            group.bench_with_input(BenchmarkId::new(spec.to_string(), n), &pts, |b, pts| {
                b.iter(|| distance_stats(pts, &spec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, stats);
criterion_main!(benches);
