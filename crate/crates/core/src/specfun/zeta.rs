use num_complex::Complex64;

use super::gamma::BERNOULLI_EVEN;
use crate::error::{Error, Result};
use crate::finite;

const EM_TERMS: usize = 12;

/// `B_{2k} / (2k)!` for k = 1..=EM_TERMS.
fn em_coefficients() -> [f64; EM_TERMS] {
    let mut out = [0.0; EM_TERMS];
    let mut fact = 1.0;
    for k in 1..=EM_TERMS {
        let n = 2 * k;
        fact *= ((n - 1) * n) as f64;
        out[k - 1] = BERNOULLI_EVEN[k - 1] / fact;
    }
    out
}

/// Number of directly summed terms, chosen from `|s|` so that the
/// Euler-Maclaurin remainder ratio is below `1/30` per order.
fn em_cutoff(s: Complex64) -> usize {
    (s.norm() + 2.0 * EM_TERMS as f64).ceil() as usize + 10
}

fn check_domain(s: Complex64, what: &str) -> Result<()> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("zeta"));
    }
    if !(s.re > 0.0) {
        return Err(Error::Domain(format!("{what}: Re(s) = {} must be positive", s.re)));
    }
    Ok(())
}

#[inline]
fn cpow_real(base: f64, s: Complex64) -> Complex64 {
    (s * base.ln()).exp()
}

/// Euler-Maclaurin evaluation of `sum_{n>=0} (n+a)^{-s}` and optionally its
/// s-derivative.
fn hurwitz_em(s: Complex64, a: f64, derivative: bool) -> Complex64 {
    let n_cut = em_cutoff(s);
    let mut head = Complex64::new(0.0, 0.0);
    for n in 0..n_cut {
        let x = n as f64 + a;
        let term = cpow_real(x, -s);
        head += if derivative { -term * x.ln() } else { term };
    }
    let big_n = n_cut as f64 + a;
    let ln_n = big_n.ln();
    let one = Complex64::new(1.0, 0.0);
    let n_pow = cpow_real(big_n, -s);
    let sm1 = s - one;
    let mut tail = if derivative {
        let integral = n_pow * big_n / sm1;
        -integral * ln_n - integral / sm1 - n_pow * ln_n * 0.5
    } else {
        n_pow * big_n / sm1 + n_pow * 0.5
    };
    // T_k = B_2k/(2k)! * s (s+1) ... (s+2k-2) * N^{-s-2k+1}
    let coeffs = em_coefficients();
    let mut poch = s;
    let mut dpoch_over = s.inv();
    let mut pow = n_pow / big_n;
    let inv_n2 = 1.0 / (big_n * big_n);
    for (k, c) in coeffs.iter().enumerate() {
        let term = poch * pow * *c;
        tail += if derivative { term * (dpoch_over - ln_n) } else { term };
        let j = 2 * k as u32 + 1;
        let s1 = s + j as f64;
        let s2 = s + (j + 1) as f64;
        poch *= s1 * s2;
        dpoch_over += s1.inv() + s2.inv();
        pow *= inv_n2;
    }
    head + tail
}

/// Riemann zeta for `Re s > 0`, `s != 1`.
pub fn riemann_zeta(s: Complex64) -> Result<Complex64> {
    check_domain(s, "riemann_zeta")?;
    finite(hurwitz_em(s, 1.0, false), "riemann_zeta")
}

/// `zeta'(s)` from the differentiated Euler-Maclaurin formula.
pub fn zeta_derivative(s: Complex64) -> Result<Complex64> {
    check_domain(s, "zeta_derivative")?;
    finite(hurwitz_em(s, 1.0, true), "zeta_derivative")
}

/// Hurwitz zeta `sum_{n>=0} (n+a)^{-s}` for `a` in `(0, 1]`.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    check_domain(s, "hurwitz_zeta")?;
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(format!("hurwitz_zeta: a = {a} outside (0, 1]")));
    }
    finite(hurwitz_em(s, a, false), "hurwitz_zeta")
}
