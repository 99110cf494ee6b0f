use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::finite;

/// A hypergeometric value with the error estimate achieved by the summation.
#[derive(Debug, Clone, Copy)]
pub struct Hyp2F1Value {
    pub value: Complex64,
    /// Rigorous tail bound plus accumulated rounding.
    pub error_estimate: f64,
    pub terms: usize,
}

const TERM_BUDGET: usize = 100_000;
const TARGET: f64 = 1e-8;

/// Gauss `2F1(a, b; c; z)` by its power series for real `|z| < 0.9`.
pub fn gauss_2f1(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Result<Hyp2F1Value> {
    if !(z.abs() < 0.9) {
        return Err(Error::Domain(format!("gauss_2f1: |z| = {} must be below 0.9", z.abs())));
    }
    if c.im == 0.0 && c.re <= 0.0 && c.re == c.re.round() {
        return Err(Error::Pole("gauss_2f1 (c a non-positive integer)"));
    }
    let one = Complex64::new(1.0, 0.0);
    if z == 0.0 {
        return Ok(Hyp2F1Value { value: one, error_estimate: 0.0, terms: 1 });
    }
    let (na, nb) = (a.norm(), b.norm());
    let mut term = one;
    let mut sum = one;
    let mut max_term = 1.0f64;
    let mut tail = f64::INFINITY;
    let mut k = 0usize;
    while k < TERM_BUDGET {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        k += 1;
        max_term = max_term.max(term.norm());
        if term == Complex64::new(0.0, 0.0) {
            // Terminating series (a or b a non-positive integer).
            tail = 0.0;
            break;
        }
        // For j >= k the term ratio is at most rho.
        let kf = k as f64;
        let f1 = ((kf + na) / (kf + 1.0)).max(1.0);
        let denom_c = if c.re >= 0.0 { kf + c.re } else { kf - c.norm() };
        if denom_c <= 0.0 {
            continue;
        }
        let f2 = ((kf + nb) / denom_c).max(1.0);
        let rho = z.abs() * f1 * f2;
        if rho < 1.0 {
            tail = term.norm() * rho / (1.0 - rho);
            if tail <= 1e-17 * sum.norm() {
                break;
            }
        }
    }
    let rounding = f64::EPSILON * max_term * (k as f64).sqrt();
    let error_estimate = tail + rounding;
    if !(error_estimate <= TARGET * sum.norm().max(1.0)) {
        return Err(Error::Convergence(format!(
            "gauss_2f1 tail bound {error_estimate:e} after {k} terms"
        )));
    }
    Ok(Hyp2F1Value { value: finite(sum, "gauss_2f1")?, error_estimate, terms: k })
}

/// First-order large-`r` expansion of `2F1(1/4+ir, 3/4+ir; 1+2ir; 4/x^2)`:
/// x^{2ir} e^{-2ir acosh(x/2)} (x^2/(x^2-4))^{1/4} (1 + correction/(16 i r)).
///
/// `correction` is `1 - x/sqrt(x^2-4)`, which numerically matches the true
/// first-order term; [`hyp_asymptotic_printed`] keeps the variant
/// `1 - (x^2-2)/(x sqrt(x^2-4))` for comparison.
pub fn hyp_asymptotic(x: f64, r: f64) -> Complex64 {
    let root = (x * x - 4.0).sqrt();
    hyp_asymptotic_with(x, r, 1.0 - x / root)
}

pub fn hyp_asymptotic_printed(x: f64, r: f64) -> Complex64 {
    let root = (x * x - 4.0).sqrt();
    hyp_asymptotic_with(x, r, 1.0 - (x * x - 2.0) / (x * root))
}

fn hyp_asymptotic_with(x: f64, r: f64, correction: f64) -> Complex64 {
    let phase = 2.0 * r * (x.ln() - (x / 2.0).acosh());
    let amplitude = (x * x / (x * x - 4.0)).powf(0.25);
    let first = Complex64::new(1.0, -correction / (16.0 * r));
    Complex64::from_polar(amplitude, phase) * first
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn elementary_cases() {
        assert_eq!(gauss_2f1(c(3.0, 1.0), c(2.0, 0.0), c(5.0, 0.0), 0.0).unwrap().value, c(1.0, 0.0));
        let z = 0.5;
        let v = gauss_2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), z).unwrap();
        assert!((v.value.re + (1.0f64 - z).ln() / z).abs() < 1e-14);
        assert!(v.error_estimate < 1e-13);
        // (1 - z)^{-a} = 2F1(a, b; b; z)
        let a = c(0.3, 2.0);
        let v = gauss_2f1(a, c(1.5, -1.0), c(1.5, -1.0), -0.7).unwrap();
        let expected = (-a * 1.7f64.ln()).exp();
        assert!((v.value - expected).norm() < 1e-13);
    }

    #[test]
    fn terminating_series_is_a_polynomial() {
        // 2F1(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2/(c(c+1))
        let (b, cc, z) = (c(0.5, 1.0), c(2.0, 0.5), 0.6);
        let v = gauss_2f1(c(-2.0, 0.0), b, cc, z).unwrap().value;
        let expected = 1.0 - b * 2.0 * z / cc + b * (b + 1.0) * z * z / (cc * (cc + 1.0));
        assert!((v - expected).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gauss_2f1(c(1.0, 0.0), c(1.0, 0.0), c(-3.0, 0.0), 0.1).is_err());
        assert!(gauss_2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), 0.95).is_err());
    }

    #[test]
    fn large_parameter_values_match_reference() {
        // mpmath hyp2f1(1/4+20i, 3/4+20i, 1+40i, 0.04) at 40 digits
        let v = gauss_2f1(c(0.25, 20.0), c(0.75, 20.0), c(1.0, 40.0), 0.04).unwrap();
        let reference = c(0.928_049_938_290_545_2, 0.399_175_046_923_235_5);
        assert!((v.value - reference).norm() < 1e-13, "{}", v.value);
        let v = gauss_2f1(c(0.25, 80.0), c(0.75, 80.0), c(1.0, 160.0), 0.04).unwrap();
        let reference = c(-0.054_292_891_780_382_1, 1.008_797_700_445_755_4);
        assert!((v.value - reference).norm() < 1e-12, "{}", v.value);
    }

    #[test]
    fn asymptotic_error_shrinks_quadratically() {
        let x = 10.0;
        let z = 4.0 / (x * x);
        let dev = |r: f64| {
            let f = gauss_2f1(c(0.25, r), c(0.75, r), c(1.0, 2.0 * r), z).unwrap().value;
            (f - hyp_asymptotic(x, r)).norm()
        };
        let (d20, d40, d80) = (dev(20.0), dev(40.0), dev(80.0));
        assert!((3.0..=5.0).contains(&(d20 / d40)), "{}", d20 / d40);
        assert!((3.0..=5.0).contains(&(d40 / d80)), "{}", d40 / d80);
    }
}
