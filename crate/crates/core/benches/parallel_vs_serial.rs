//! Rayon vs sequential comparison of the two batch-heavy kernels: correlated
//! matrix assembly (over basis-function pairs) and the pair-decomposition
//! identity sweep (over phase points).
//!
//! With the default `parallel` feature the public entry points run on rayon;
//! the `*_serial` baselines are always sequential, so a single `cargo bench`
//! reports both.  Building with `--no-default-features` makes the public
//! entry points identical to the baselines.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use bosebound::hylleraas::{assemble_raw, assemble_raw_serial};
use bosebound::system::{
    pair_decomposition_residuals, pair_decomposition_residuals_serial, random_phase_point, reduce,
    SystemSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("hylleraas_assembly_omega6");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(assemble_raw(1.0, 6, 12, 12)))
    });
    group.bench_function("serial", |b| {
        b.iter(|| black_box(assemble_raw_serial(1.0, 6, 12, 12)))
    });
    group.finish();
}

fn bench_identity_sweep(c: &mut Criterion) {
    let spec = SystemSpec::fixed_grain(10, 1.0);
    let sys = reduce(&spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let points: Vec<_> = (0..1000)
        .map(|_| random_phase_point(&mut rng, 10, true))
        .collect();

    let mut group = c.benchmark_group("pair_decomposition_1000pts_n10");
    group.bench_function("parallel", |b| {
        b.iter_batched(
            || points.clone(),
            |pts| black_box(pair_decomposition_residuals(&sys, &pts).unwrap()),
            BatchSize::LargeInput,
        )
    });
    group.bench_function("serial", |b| {
        b.iter_batched(
            || points.clone(),
            |pts| black_box(pair_decomposition_residuals_serial(&sys, &pts).unwrap()),
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

criterion_group!(benches, bench_assembly, bench_identity_sweep);
criterion_main!(benches);
