use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ionospec_core::oracle::{discretize, evolve, EvolveOptions};
use ionospec_core::spectra::{figure_preset, spectrum_grid};
use ionospec_core::zeros::{default_zero_range, find_dynamical_zeros, sweep_zero_traces, SweepOptions};
use ionospec_core::{InitialState, NormalizedParams};

fn spectrum(c: &mut Criterion) {
    let p = NormalizedParams::neighbor(1.0, 1.0, 2.0, 1.0, 0.8);
    let mut group = c.benchmark_group("spectrum_grid");
    for n in [201, 2001, 20001] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| spectrum_grid(black_box(&p), -9.0, 11.0, n).unwrap())
        });
    }
    group.finish();
}

fn zeros(c: &mut Criterion) {
    let p = NormalizedParams::neighbor(0.1, 1.0, 0.2, 1.0, 1.0);
    let range = default_zero_range(&p, 0).unwrap();
    c.bench_function("find_dynamical_zeros", |b| {
        b.iter(|| find_dynamical_zeros(black_box(&p), 0, range).unwrap())
    });

    let preset = figure_preset("fig6c").unwrap();
    let coarse: Vec<f64> = preset.omegas.iter().copied().step_by(5).collect();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("fig6c_coarse", |b| {
        b.iter(|| sweep_zero_traces(&preset.params, &coarse, 0, &SweepOptions::default()).unwrap())
    });
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let p = NormalizedParams::neighbor(1.0, 1.0, 1.0, 1.0, 1.0).to_physical().unwrap();
    let opts = EvolveOptions {
        tol: 1.0,
        max_step: 0.05,
        samples: 1,
    };
    let mut group = c.benchmark_group("oracle_step");
    for n in [401, 2001] {
        let disc = discretize(&p, 40.0, n).unwrap();
        let x0 = disc.initial_state(&InitialState::ground());
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| evolve(&disc, black_box(&x0), 0.05, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, spectrum, zeros, oracle);
criterion_main!(benches);
