use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use zagier_core::arith::{gcd, mobius};
use zagier_core::kloosterman::{
    kloosterman, kloosterman_diagonal_batch, kloosterman_direct, linnik_sum, weil_bound, weighted_kloosterman_sum,
};
use zagier_core::spectral::{exp_sum, phi_test, test_function_params, weighted_exp_sum, weyl_count};
use zagier_core::EigenvalueTable;

/// Ramanujan sum `c_q(m) = sum_{d | gcd(m, q)} mu(q/d) d`, which equals S(m, 0; q).
fn ramanujan(m: i64, q: u64) -> f64 {
    let g = gcd(m.unsigned_abs(), q);
    (1..=g).filter(|d| g.is_multiple_of(*d)).map(|d| mobius(q / d).unwrap() as f64 * d as f64).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sums_are_real_and_within_weil(m in -200i64..200, n in -200i64..200, c in 1u64..3000) {
        let s = kloosterman(m, n, c).unwrap().value;
        prop_assert!(s.im.abs() < 1e-9 * (c as f64).max(1.0));
        prop_assert!(s.re.abs() <= weil_bound(m, n, c).unwrap() + 1e-9);
    }

    #[test]
    fn degenerate_sum_is_ramanujan(m in -500i64..500, c in 1u64..2000) {
        let s = kloosterman(m, 0, c).unwrap().value.re;
        prop_assert!((s - ramanujan(m, c)).abs() < 1e-8 * c as f64);
    }

    #[test]
    fn unit_twist_moves_between_arguments(m in 1i64..100, n in 1i64..100, a in 1i64..50, c in 2u64..1500) {
        prop_assume!(gcd(a as u64, c) == 1);
        let left = kloosterman(a * m, n, c).unwrap().value;
        let right = kloosterman(m, a * n, c).unwrap().value;
        prop_assert!((left - right).norm() < 1e-9);
    }

    #[test]
    fn batch_agrees_with_the_definition(c in 1u64..800) {
        let ns: Vec<i64> = (1..20).collect();
        let batch = kloosterman_diagonal_batch(c, &ns).unwrap();
        for (&n, &b) in ns.iter().zip(&batch) {
            let d = kloosterman_direct(n, n, c).unwrap().value.re;
            prop_assert!((b - d).abs() < 1e-9);
        }
    }
}

#[test]
fn linnik_partial_sums_by_explicit_loop() {
    for (n, cap, d) in [(1i64, 60.0, 1i64), (3, 80.0, 5), (2, 40.0, 7)] {
        let mut want = Complex64::default();
        for c in 1..=cap as u64 {
            let s = kloosterman_direct(n, n, c).unwrap().value;
            let r = d.rem_euclid(c as i64) as f64;
            want += Complex64::from_polar(1.0, 2.0 * PI * r / c as f64) * s / c as f64;
        }
        let got = linnik_sum(n, cap, d).unwrap();
        assert!((got - want).norm() < 1e-10, "{n} {cap} {d}: {got} vs {want}");
    }
}

#[test]
fn weighted_sum_truncation_converges() {
    let a = weighted_kloosterman_sum(20.0, 1e3, 5.0, 1000).unwrap();
    let b = weighted_kloosterman_sum(20.0, 1e3, 5.0, 4000).unwrap();
    assert!((a.value - b.value).norm() <= 4.0 * a.tail_estimate.max(1e-12));
}

#[test]
fn test_function_matches_closed_form() {
    let p = test_function_params(1e4, 10.0).unwrap();
    for x in [0.1, 1.0, 3.0] {
        let v = phi_test(x, &p);
        let want = p.beta.sinh().powi(2) / (2.0 * PI) * x * x * (-p.c * x).exp();
        assert!((v - want).norm() <= 1e-12 * want.norm());
    }
}

#[test]
fn spectral_sums_on_a_synthetic_table() {
    let table = EigenvalueTable::new(vec![9.5, 12.25, 13.75, 14.5], "synthetic").unwrap();
    let x: f64 = 50.0;
    let s = exp_sum(&table, x, 13.0);
    let want = Complex64::from_polar(1.0, 9.5 * x.ln()) + Complex64::from_polar(1.0, 12.25 * x.ln());
    assert!((s - want).norm() < 1e-14);
    let w = weighted_exp_sum(&table, x, 10.0);
    let want: Complex64 =
        table.t_values.iter().map(|&t| Complex64::from_polar(t * (-t / 10.0).exp(), t * x.ln())).sum();
    assert!((w - want).norm() < 1e-12);
    assert!(weyl_count(100.0) > 0.0);
}
