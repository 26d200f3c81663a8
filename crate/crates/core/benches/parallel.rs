//! Compares the data-parallel scheduler against the always-sequential
//! fallback on the two hot workloads: bootstrap resampling and the PPP
//! synthetic-draw loop.
//!
//! Build with the default features for the rayon path; `--no-default-features`
//! turns `indexed_map` itself into the sequential fallback.

use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use ppp_core::bootstrap::bootstrap_se_on;
use ppp_core::estimators::EstimatorKind;
use ppp_core::exec::{derive_seed, indexed_map, indexed_map_seq};
use ppp_core::ppp::{ppp_algorithm_a, StatisticSpec};
use ppp_core::sim::{gen_regular, DgpConfig, DgpKind};

fn toy_data(n: usize) -> (Vec<u8>, Vec<f64>, DMatrix<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = DMatrix::from_fn(n, 3, |_, _| rng.random::<f64>() * 2.0 - 1.0);
    let z: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| x[(i, 0)] + 0.2 * f64::from(z[i]) + rng.random::<f64>())
        .collect();
    (z, y, x)
}

fn bench_scheduler(c: &mut Criterion) {
    // pure scheduling overhead on a CPU-bound task
    let work = |i: usize| {
        let mut acc = derive_seed(3, i as u64);
        for _ in 0..2000 {
            acc = derive_seed(acc, 1);
        }
        acc
    };
    c.bench_function("indexed_map/feature_path", |b| {
        b.iter(|| black_box(indexed_map(256, work)))
    });
    c.bench_function("indexed_map/sequential", |b| {
        b.iter(|| black_box(indexed_map_seq(256, work)))
    });
}

fn bench_bootstrap(c: &mut Criterion) {
    let (z, y, x) = toy_data(400);
    c.bench_function("bootstrap_se/dr_b200", |b| {
        b.iter(|| {
            black_box(bootstrap_se_on(&z, &y, &x, &x, EstimatorKind::Dr, 200, 7).unwrap())
        })
    });
}

fn bench_ppp(c: &mut Criterion) {
    let sim = gen_regular(&DgpConfig::new(DgpKind::Regular, 200, 3));
    let spec = StatisticSpec::new(EstimatorKind::Dr, true);
    c.bench_function("ppp_a/n200_r100", |b| {
        b.iter(|| black_box(ppp_algorithm_a(&sim, &spec, 100, 100, 5).unwrap()))
    });
}

criterion_group!(benches, bench_scheduler, bench_bootstrap, bench_ppp);
criterion_main!(benches);
