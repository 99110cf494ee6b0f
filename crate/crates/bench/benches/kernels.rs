use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use zagier_core::geodesics::{form_class_data, psi_direct, psi_via_zagier, ClassDataCache, TraceRange};
use zagier_core::kloosterman::{kloosterman, kloosterman_diagonal_batch, kloosterman_direct, WeightedKloosterman};
use zagier_core::smoothing::omega_window;
use zagier_core::specfun::{gauss_2f1, hurwitz_zeta};
use zagier_core::zagier::{central_values, zagier_l};
use zagier_core::WindowParams;

fn l_values(c: &mut Criterion) {
    let mut g = c.benchmark_group("l_values");
    for n in [10u64, 1_000, 100_000] {
        g.bench_with_input(BenchmarkId::new("zagier_l_at_1", n), &n, |b, &n| {
            b.iter(|| zagier_l(black_box(n), Complex64::new(1.0, 0.0)).unwrap())
        });
    }
    g.bench_function("central_values_10k", |b| b.iter(|| central_values(black_box(3), 10_002).unwrap()));
    g.bench_function("hurwitz_zeta", |b| {
        b.iter(|| hurwitz_zeta(black_box(Complex64::new(0.5, 14.0)), black_box(0.3)).unwrap())
    });
    g.finish();
}

fn geodesics(c: &mut Criterion) {
    let mut g = c.benchmark_group("geodesics");
    g.bench_function("form_class_data_999997", |b| b.iter(|| form_class_data(black_box(999_997)).unwrap()));
    g.bench_function("psi_direct_1e5", |b| {
        b.iter(|| psi_direct(black_box(1e5), &ClassDataCache::in_memory()).unwrap())
    });
    g.bench_function("psi_via_zagier_1e5", |b| {
        b.iter(|| psi_via_zagier(black_box(1e5), TraceRange::NormCutoff).unwrap())
    });
    g.finish();
}

fn kloosterman_sums(c: &mut Criterion) {
    let mut g = c.benchmark_group("kloosterman");
    for modulus in [997u64, 30_030, 1_000_003] {
        g.bench_with_input(BenchmarkId::new("sieved", modulus), &modulus, |b, &m| {
            b.iter(|| kloosterman(3, 7, black_box(m)).unwrap())
        });
    }
    g.bench_function("direct_30030", |b| b.iter(|| kloosterman_direct(3, 7, black_box(30_030)).unwrap()));
    let ns: Vec<i64> = (101..200).collect();
    g.bench_function("diagonal_batch_5000", |b| b.iter(|| kloosterman_diagonal_batch(black_box(5000), &ns).unwrap()));
    g.sample_size(10);
    g.bench_function("weighted_setup_n50_q1000", |b| {
        b.iter(|| WeightedKloosterman::new(50.0, 1e4, 10.0, 1000).unwrap().direct().unwrap())
    });
    g.finish();
}

fn special_functions(c: &mut Criterion) {
    let mut g = c.benchmark_group("special");
    for r in [5.0, 80.0] {
        g.bench_with_input(BenchmarkId::new("gauss_2f1", r), &r, |b, &r| {
            b.iter(|| {
                gauss_2f1(Complex64::new(0.25, r), Complex64::new(0.75, r), Complex64::new(1.0, 2.0 * r), 0.04)
                    .unwrap()
            })
        });
    }
    let p = WindowParams::new(1e4, 0.1, 0.5).unwrap();
    g.bench_function("omega_window_transition", |b| b.iter(|| omega_window(black_box(9500.0), &p).unwrap()));
    g.finish();
}

criterion_group!(benches, l_values, geodesics, kloosterman_sums, special_functions);
criterion_main!(benches);
