//! Upper incomplete gamma `Gamma(a, w)` for complex `a` and complex `w` in the
//! open right half-plane.

use num_complex::Complex64;

use super::gamma::{complex_gamma, EULER_GAMMA};
use crate::error::{Error, Result};
use crate::finite;

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 20_000;

fn nonpositive_integer(a: Complex64) -> Option<i64> {
    if a.im == 0.0 && a.re <= 0.0 && a.re == a.re.round() {
        Some(a.re as i64)
    } else {
        None
    }
}

pub fn upper_incomplete_gamma(a: Complex64, w: Complex64) -> Result<Complex64> {
    if !(w.re > 0.0) {
        return Err(Error::Domain(format!("upper_incomplete_gamma: Re(w) = {} must be positive", w.re)));
    }
    let value = if let Some(m) = nonpositive_integer(a) {
        negative_integer_order(-m as u32, w)?
    } else if use_series(a, w) {
        complex_gamma(a)? - lower_series(a, w)?
    } else {
        continued_fraction(a, w)?
    };
    finite(value, "upper_incomplete_gamma")
}

fn use_series(a: Complex64, w: Complex64) -> bool {
    let wn = w.norm();
    wn < 1.5 || wn < 0.7 * a.norm()
}

/// `gamma(a, w) = w^a e^{-w} sum_k w^k / (a (a+1) ... (a+k))`.
fn lower_series(a: Complex64, w: Complex64) -> Result<Complex64> {
    let mut term = a.inv();
    let mut sum = term;
    for k in 1..MAX_ITER {
        term *= w / (a + k as f64);
        sum += term;
        if term.norm() < EPS * sum.norm() {
            return Ok((a * w.ln() - w).exp() * sum);
        }
    }
    Err(Error::Convergence(format!("incomplete gamma series at a = {a}, w = {w}")))
}

/// Modified Lentz evaluation of the Legendre continued fraction.
fn continued_fraction(a: Complex64, w: Complex64) -> Result<Complex64> {
    let tiny = 1e-300;
    let mut b = w + 1.0 - a;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (Complex64::new(i as f64, 0.0) - a);
        b += 2.0;
        d = an * d + b;
        if d.norm() < tiny {
            d = Complex64::new(tiny, 0.0);
        }
        c = b + an / c;
        if c.norm() < tiny {
            c = Complex64::new(tiny, 0.0);
        }
        d = d.inv();
        let del = d * c;
        h *= del;
        if (del - 1.0).norm() < EPS {
            return Ok((a * w.ln() - w).exp() * h);
        }
    }
    Err(Error::Convergence(format!("incomplete gamma continued fraction at a = {a}, w = {w}")))
}

/// Exponential integral `E_1(w) = Gamma(0, w)`.
pub fn exp_integral_e1(w: Complex64) -> Result<Complex64> {
    if !(w.re > 0.0) {
        return Err(Error::Domain(format!("exp_integral_e1: Re(w) = {} must be positive", w.re)));
    }
    if w.norm() < 2.0 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 1..200 {
            term *= -w / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.norm() < EPS * sum.norm().max(1e-300) {
                break;
            }
        }
        Ok(-EULER_GAMMA - w.ln() - sum)
    } else {
        continued_fraction(Complex64::new(0.0, 0.0), w)
    }
}

/// `Gamma(-m, w)` from `E_1` by `Gamma(a, w) = (Gamma(a+1, w) - w^a e^{-w}) / a`.
fn negative_integer_order(m: u32, w: Complex64) -> Result<Complex64> {
    let mut g = exp_integral_e1(w)?;
    let ew = (-w).exp();
    for j in 1..=m {
        let a = -(j as f64);
        g = (g - w.powf(a) * ew) / a;
    }
    Ok(g)
}
