use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramify_core::batch::analyze_batch_sequential;
#[cfg(feature = "parallel")]
use ramify_core::batch::analyze_batch_parallel;
use ramify_core::{AnalysisConfig, PrimeField, TwoDimElement, Q};

fn inputs(n: usize) -> Vec<TwoDimElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    (0..n)
        .map(|_| {
            let p = if rng.gen_bool(0.5) { 2 } else { 3 };
            let f = Arc::new(PrimeField::new(p, 1).unwrap());
            let mut a = TwoDimElement::zero(f.clone());
            for _ in 0..rng.gen_range(2..6) {
                let c = f.from_int(rng.gen_range(1..p as i64));
                let t = Q::from_integer(rng.gen_range(-3..=5));
                let pi = Q::from_integer(rng.gen_range(-16..=2));
                a = a.add(&TwoDimElement::monomial(f.clone(), c, t, pi)).unwrap();
            }
            a
        })
        .collect()
}

fn bench_batch(c: &mut Criterion) {
    let cfg = AnalysisConfig::default();
    let mut group = c.benchmark_group("analyze_batch");
    group.sample_size(10);
    for n in [64usize, 256] {
        let data = inputs(n);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("sequential", n), &data, |b, d| {
            b.iter(|| analyze_batch_sequential(black_box(d), &cfg))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &data, |b, d| {
            b.iter(|| analyze_batch_parallel(black_box(d), &cfg))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_batch);
criterion_main!(benches);
