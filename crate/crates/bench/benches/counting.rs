use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use dsym_core::counting::{count_cylinders_many, count_saddles_many};
use dsym_core::surface::{build, TwistPoint};

fn cylinders(c: &mut Criterion) {
    let mut g = c.benchmark_group("count_cylinders");
    g.sample_size(10);
    for (label, tw) in [
        ("generic", TwistPoint::float(0.4142135, 0.7320508, 2).unwrap()),
        ("torsion", TwistPoint::ratio(2, 0, 3, 2).unwrap()),
    ] {
        let s = build(2, tw).unwrap();
        for t in [100.0, 300.0] {
            g.bench_with_input(BenchmarkId::new(label, t), &t, |b, &t| {
                b.iter(|| count_cylinders_many(black_box(&s), &[t], 1).unwrap())
            });
        }
    }
    g.finish();
}

fn saddles(c: &mut Criterion) {
    let mut g = c.benchmark_group("count_saddles");
    g.sample_size(10);
    let s = build(4, TwistPoint::float(0.4142135, 0.7320508, 4).unwrap()).unwrap();
    for t in [100.0, 300.0] {
        g.bench_with_input(BenchmarkId::new("generic", t), &t, |b, &t| {
            b.iter(|| count_saddles_many(black_box(&s), &[t], None, 1).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, cylinders, saddles);
criterion_main!(benches);
