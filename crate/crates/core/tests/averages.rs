use num_complex::Complex64;
use proptest::prelude::*;

use zagier_core::averages::{
    error_scan_with, exponent_fit, main_term_integral, omega_sup, partial_sum, ErrorTerm, PrefixSums,
};
use zagier_core::zagier::{critical_line_values, zagier_l};

fn error_term(t: f64, n_max: u64) -> ErrorTerm {
    ErrorTerm::new(PrefixSums::compute(t, n_max).unwrap()).unwrap()
}

#[test]
fn error_jumps_by_the_l_value_at_each_trace() {
    for t in [0.0, 3.5] {
        let err = error_term(t, 400);
        for n in [3u64, 10, 97, 400] {
            let jump = err.eval(n as f64).unwrap() - err.eval_left(n).unwrap();
            let l = zagier_l(n, Complex64::new(0.5, t)).unwrap().value;
            assert!((jump - l).norm() < 1e-9, "t = {t}, n = {n}: {jump} vs {l}");
        }
    }
}

#[test]
fn prefix_sums_match_direct_partial_sums() {
    for t in [0.0, -7.0] {
        let sums = PrefixSums::compute(t, 2000).unwrap();
        for x in [2.5, 3.0, 17.9, 500.0, 2000.0] {
            let a = sums.at(x).unwrap();
            let b = partial_sum(x, t).unwrap();
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0), "t = {t}, X = {x}");
        }
    }
}

#[test]
fn error_scan_is_sum_minus_main_term() {
    let sums = PrefixSums::compute(0.0, 5000).unwrap();
    let records = error_scan_with(&sums, &[10.0, 123.4, 4999.5]).unwrap();
    for r in &records {
        let main = main_term_integral(r.x, 0.0).unwrap();
        assert!((r.main_term - main).norm() <= 1e-8 * r.x);
        assert!((r.error - (r.partial_sum - r.main_term)).norm() == 0.0);
        assert!((r.normalized - r.error.norm() / r.x.sqrt()).abs() < 1e-15);
    }
}

#[test]
fn decade_maximum_dominates_grid_samples() {
    let err = error_term(0.0, 1000);
    let w = omega_sup(&err, 100, 1000).unwrap();
    for k in 0..200 {
        let x = 100.0 + 4.5 * k as f64;
        assert!(err.eval(x).unwrap().norm() / x.sqrt() <= w.max_normalized + 1e-12);
    }
}

#[test]
fn exponent_fit_recovers_a_power_law() {
    let values: Vec<Complex64> = critical_line_values(3, 3000, 0.0).unwrap();
    let sums = PrefixSums::from_values(0.0, &values);
    let grid: Vec<f64> = (0..30).map(|k| 50.0 * 1.12f64.powi(k)).filter(|x| *x <= 3000.0).collect();
    let records = error_scan_with(&sums, &grid).unwrap();
    let fit = exponent_fit(&records).unwrap();
    assert!(fit.slope.is_finite() && fit.r_squared >= 0.0 && fit.r_squared <= 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The main term is additive over adjacent ranges.
    #[test]
    fn main_term_is_additive(a in 3.0f64..500.0, b in 3.0f64..500.0, t in -20.0f64..20.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let whole = main_term_integral(hi, t).unwrap();
        let part = main_term_integral(lo, t).unwrap();
        let params = zagier_core::DensityParams::new(t).unwrap();
        let middle = params.integral_between(lo, hi).unwrap();
        prop_assert!((whole - part - middle).norm() <= 1e-9 * whole.norm().max(1.0));
    }
}
