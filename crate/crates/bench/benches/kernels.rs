use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nctorus_core::algebra::random_element;
use nctorus_core::operators::{assemble_lm, Perturbation};
use nctorus_core::spectral::{fit_weyl_asymptotics, heat_trace_series, hermitian_eigen, linear_grid};
use nctorus_core::stochastic::{sample_brownian, simulate_flows, PhaseConvention};
use nctorus_core::{GaugeConfig, LatticeWindow, TorusElement};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const THETA: f64 = 0.3;

fn standard() -> (GaugeConfig, Perturbation) {
    let x = TorusElement::x(THETA);
    let r1 = x.add(&x.adjoint()).unwrap().scale(Complex64::new(0.3, 0.0));
    (GaugeConfig::new(THETA).with_beta([0.25, 0.5]), Perturbation(r1, TorusElement::zero(THETA)))
}

fn weyl_mul(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_element(THETA, 25, 5, &mut rng);
    let b = random_element(THETA, 25, 5, &mut rng);
    c.bench_function("weyl_mul_25x25", |bench| bench.iter(|| black_box(&a).mul(black_box(&b)).unwrap()));
}

fn assemble(c: &mut Criterion) {
    let (cfg, r) = standard();
    let w = LatticeWindow::new(32).unwrap();
    c.bench_function("assemble_lm_N32", |bench| bench.iter(|| assemble_lm(&cfg, black_box(&r), &w).unwrap()));
}

fn eigen(c: &mut Criterion) {
    let (cfg, r) = standard();
    let w = LatticeWindow::new(32).unwrap();
    let lm = assemble_lm(&cfg, &r, &w).unwrap();
    c.bench_function("hermitian_eigen_N32", |bench| bench.iter(|| hermitian_eigen(black_box(&lm), false).unwrap()));
}

fn fit(c: &mut Criterion) {
    let (cfg, r) = standard();
    let w = LatticeWindow::new(48).unwrap();
    let spec = hermitian_eigen(&assemble_lm(&cfg, &r, &w).unwrap(), false).unwrap();
    let grid = linear_grid(0.02, 0.1, 17);
    c.bench_function("heat_trace_fit_N48", |bench| {
        bench.iter(|| fit_weyl_asymptotics(&heat_trace_series(black_box(&spec), &grid, 48).unwrap()).unwrap())
    });
}

fn flow(c: &mut Criterion) {
    let ens = sample_brownian(1e-3, 1000, 2000, 7).unwrap();
    let modes = [((1, 0), Complex64::new(-4.6, 0.0))];
    let mut group = c.benchmark_group("flow");
    group.sample_size(10);
    group.bench_function("simulate_2000_paths", |bench| {
        bench.iter(|| simulate_flows(black_box(&ens), &modes, PhaseConvention::Natural, &[0.5, 1.0]).unwrap())
    });
    group.finish();
}

criterion_group!(benches, weyl_mul, assemble, eigen, fit, flow);
criterion_main!(benches);
