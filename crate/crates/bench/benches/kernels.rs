use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dispersim_bench::townes;
use dispersim_core::evolution::{default_samples, EvolutionConfig, Evolver};
use dispersim_core::resolvent::{assemble_free, build_expansion, m_inverse_feshbach, Branch};
use dispersim_core::specfun::hankel0;
use dispersim_core::spectral::{discretize_h, eigen_spectrum};
use dispersim_core::Sign;

fn special_functions(c: &mut Criterion) {
    let xs: Vec<f64> = (1..=256).map(|k| 0.05 * k as f64).collect();
    c.bench_function("hankel0 x256", |b| {
        b.iter(|| xs.iter().map(|&x| hankel0(Sign::Plus, black_box(x)).re).sum::<f64>())
    });
}

fn free_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble_free");
    group.sample_size(10);
    for n in [12, 20] {
        let (g, _) = townes(8.0, n, 1.0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| assemble_free(Branch::Upper, Sign::Plus, black_box(0.5), 1.0, g).unwrap())
        });
    }
    group.finish();
}

fn threshold(c: &mut Criterion) {
    let mut group = c.benchmark_group("threshold");
    group.sample_size(10);
    let (g, p) = townes(6.0, 14, 0.1);
    group.bench_function("build_expansion n=14", |b| b.iter(|| build_expansion(&p, &g, 1.0).unwrap()));
    let e = build_expansion(&p, &g, 1.0).unwrap();
    group.bench_function("feshbach n=14", |b| {
        b.iter(|| m_inverse_feshbach(Sign::Plus, black_box(0.05), &e, &p, &g).unwrap())
    });
    group.finish();
}

fn spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum");
    group.sample_size(10);
    let (g, p) = townes(8.0, 16, 0.5);
    let h = discretize_h(&p, &g, 1.0).unwrap();
    group.bench_function("eigen_spectrum n=16", |b| b.iter(|| eigen_spectrum(&h, 1.0).unwrap()));
    group.finish();
}

fn evolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolution");
    group.sample_size(10);
    let (g, p) = townes(4.0, 10, 0.0);
    let mut cfg = EvolutionConfig::new(1.0, &g);
    cfg.x_samples = default_samples(&g, 3);
    cfg.y_samples = default_samples(&g, 3);
    cfg.lambda_high = 20.0;
    group.bench_function("free jump cache n=10", |b| b.iter(|| Evolver::new(&p, None, &g, &cfg).unwrap()));
    let ev = Evolver::new(&p, None, &g, &cfg).unwrap();
    group.bench_function("kernels t=50", |b| b.iter(|| ev.kernels(black_box(50.0))));
    group.finish();
}

criterion_group!(benches, special_functions, free_assembly, threshold, spectrum, evolution);
criterion_main!(benches);
