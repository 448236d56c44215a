use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use selberg_core::{
    builtin_octagon, c_n_constant, enumerate_spectrum, heat_kernel_h, heat_trace, selberg_zeta_log,
    EnumerationOptions, TailModel,
};

fn kernels(c: &mut Criterion) {
    c.bench_function("heat_kernel_h(1, 0)", |b| b.iter(|| heat_kernel_h(black_box(1.0), black_box(0.0)).unwrap()));
    c.bench_function("heat_kernel_h(10, 5)", |b| b.iter(|| heat_kernel_h(black_box(10.0), black_box(5.0)).unwrap()));
    c.bench_function("c_n_constant(6)", |b| b.iter(|| c_n_constant(black_box(6)).unwrap()));
}

fn spectra(c: &mut Criterion) {
    let group = builtin_octagon();
    let mut g = c.benchmark_group("octagon");
    g.sample_size(10);
    g.bench_function("enumerate 6.2", |b| {
        b.iter(|| enumerate_spectrum(&group, &EnumerationOptions::new(black_box(6.2), 200)).unwrap())
    });
    let spec = enumerate_spectrum(&group, &EnumerationOptions::new(6.2, 200)).unwrap();
    g.bench_function("log Z(2)", |b| b.iter(|| selberg_zeta_log(&spec, black_box(2.0), 40).unwrap()));
    g.bench_function("heat trace t=5", |b| {
        b.iter(|| heat_trace(&spec, black_box(5.0), 400, TailModel::PrimeGeodesic).unwrap())
    });
    g.finish();
}

criterion_group!(benches, kernels, spectra);
criterion_main!(benches);
