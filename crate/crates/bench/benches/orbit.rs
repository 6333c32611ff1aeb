use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use modsurf::{enumerate_ball, BallQuery, SubgroupSpec, UHPoint};

fn ball(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_ball");
    let p = UHPoint::ratio(1, 7, 3, 2);
    let q = UHPoint::ratio(-2, 5, 6, 5);
    for h in [10.0, 100.0, 1000.0] {
        for spec in [SubgroupSpec::full(), SubgroupSpec::principal(2).unwrap()] {
            let query = BallQuery::new(spec.clone(), p.clone(), q.clone(), h);
            group.bench_with_input(BenchmarkId::new(spec.to_string(), h), &query, |b, query| {
                b.iter(|| enumerate_ball(black_box(query)).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, ball);
criterion_main!(benches);
