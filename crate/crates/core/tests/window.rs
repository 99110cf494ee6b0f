use proptest::prelude::*;

use zagier_core::averages::{ErrorTerm, PrefixSums};
use zagier_core::smoothing::{
    gaussian_window, omega_window, omega_window_quadrature, phi_delta, required_trace, smoothed_error_direct_with,
    smoothed_error_via_window_with, window_checks,
};
use zagier_core::WindowParams;

fn params() -> impl Strategy<Value = WindowParams> {
    (20.0f64..3000.0, 0.05f64..0.6, 0.05f64..1.0)
        .prop_map(|(x, d1, d2)| WindowParams::new(x, d1, d2).unwrap())
        .prop_filter("support in x >= 2", |p| p.support().0 >= 2.0)
}

/// Numerical derivative of the raw quadrature.
fn slope(t: f64, p: &WindowParams) -> f64 {
    let h = 1e-2;
    (omega_window_quadrature(t + h, p).unwrap() - omega_window_quadrature(t - h, p).unwrap()) / (2.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn window_properties_at_desk_constants(p in params()) {
        for c in window_checks(&p, 24).unwrap() {
            prop_assert!(c.holds, "{:?} for {:?}", c, p);
        }
    }

    /// omega' lives on the rising zone [a, p] and the falling zone [q, b];
    /// each has length at most 2 (2 sinh(delta1 log 2) X + delta2).
    #[test]
    fn derivative_support_is_two_intervals(p in params()) {
        let (a, b) = p.support();
        let (lo, hi) = p.plateau();
        prop_assume!(lo < hi);
        let cap = 2.0 * (2.0 * (p.delta1 * std::f64::consts::LN_2).sinh() * p.x + p.delta2);
        let slack = 1e-12 * p.x;
        prop_assert!(lo - a <= cap + slack && b - hi <= cap + slack);
        for k in 1..8 {
            let f = k as f64 / 8.0;
            let plateau_t = lo + f * (hi - lo);
            prop_assert!(slope(plateau_t, &p).abs() < 1e-8);
            prop_assert!(slope(a - f * 5.0, &p).abs() < 1e-8);
            prop_assert!(slope(b + f * 5.0, &p).abs() < 1e-8);
            // Rising then falling.
            prop_assert!(slope(a + f * (lo - a), &p) >= -1e-9);
            prop_assert!(slope(hi + f * (b - hi), &p) <= 1e-9);
        }
    }

    #[test]
    fn shortcut_matches_raw_quadrature(p in params(), u in 0.0f64..1.0) {
        let (a, b) = p.support();
        let t = a + u * (b - a);
        let fast = omega_window(t, &p).unwrap();
        let raw = omega_window_quadrature(t, &p).unwrap();
        prop_assert!((fast - raw).abs() < 1e-9, "t = {}: {} vs {}", t, fast, raw);
    }

    #[test]
    fn additive_bump_has_unit_mass(delta in 0.01f64..5.0) {
        let n = 4000;
        let h = 2.0 * delta / n as f64;
        let mass: f64 = (0..n).map(|k| phi_delta(-delta + (k as f64 + 0.5) * h, delta) * h).sum();
        prop_assert!((mass - 1.0).abs() < 1e-6);
    }
}

#[test]
fn smoothed_error_two_ways_on_a_small_grid() {
    let cases = [(40.0, 0.2, 0.5), (150.0, 0.1, 0.25), (400.0, 0.3, 1.0)];
    let top = cases.iter().map(|&(x, d1, d2)| required_trace(&WindowParams::new(x, d1, d2).unwrap())).max().unwrap();
    let err = ErrorTerm::new(PrefixSums::compute(0.0, top).unwrap()).unwrap();
    for (x, d1, d2) in cases {
        let p = WindowParams::new(x, d1, d2).unwrap();
        let a = smoothed_error_direct_with(&p, &err).unwrap();
        let b = smoothed_error_via_window_with(&p, &err).unwrap();
        assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "X = {x}: {a} vs {b}");
    }
}

#[test]
fn gaussian_window_is_a_smoothed_indicator() {
    // Deep inside [X, 2X] the window is 1; far outside it is 0.
    let (x, t) = (1000.0, 20.0);
    assert!((gaussian_window(1500.0, x, t).unwrap() - 1.0).abs() < 1e-12);
    assert!(gaussian_window(500.0, x, t).unwrap() < 1e-12);
    assert!((gaussian_window(x, x, t).unwrap() - 0.5).abs() < 1e-12);
}
