//! Dirichlet L-functions of real primitive characters `chi_D0 = (D0 | .)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{complex_gamma, digamma};
use super::incgamma::upper_incomplete_gamma;
use super::zeta::{hurwitz_zeta, riemann_zeta};
use crate::arith::{is_fundamental_discriminant, kronecker};
use crate::error::{Error, Result};
use crate::finite;

/// Evaluation strategy for [`dirichlet_l_route`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LRoute {
    /// Hurwitz for small conductors, functional equation otherwise.
    Auto,
    /// `|D0|^{-s} sum_a chi(a) zeta(s, a/|D0|)`; cost linear in `|D0|`.
    Hurwitz,
    /// Smoothed functional equation; cost of order `sqrt(|D0|)`.
    FunctionalEquation,
}

const HURWITZ_MAX_CONDUCTOR: u64 = 300;

/// `L(s, chi_D0)` for fundamental `D0` and `Re s > 0`.
pub fn dirichlet_l(s: Complex64, d0: i64) -> Result<Complex64> {
    dirichlet_l_route(s, d0, LRoute::Auto)
}

pub fn dirichlet_l_route(s: Complex64, d0: i64, route: LRoute) -> Result<Complex64> {
    if !is_fundamental_discriminant(d0) {
        return Err(Error::Domain(format!("dirichlet_L: {d0} is not a fundamental discriminant")));
    }
    if !(s.re > 0.0) {
        return Err(Error::Domain(format!("dirichlet_L: Re(s) = {} must be positive", s.re)));
    }
    if d0 == 1 {
        return riemann_zeta(s);
    }
    let k = d0.unsigned_abs();
    let route = match route {
        LRoute::Auto if k <= HURWITZ_MAX_CONDUCTOR => LRoute::Hurwitz,
        LRoute::Auto => LRoute::FunctionalEquation,
        r => r,
    };
    let value = match route {
        LRoute::Hurwitz => via_hurwitz(s, d0, k)?,
        _ => via_functional_equation(s, d0, k)?,
    };
    finite(value, "dirichlet_L")
}

fn via_hurwitz(s: Complex64, d0: i64, k: u64) -> Result<Complex64> {
    let kf = k as f64;
    if s == Complex64::new(1.0, 0.0) {
        // L(1, chi) = -(1/k) sum chi(a) psi(a/k) for non-principal chi.
        let mut acc = 0.0;
        for a in 1..k {
            let chi = kronecker(d0, a);
            if chi != 0 {
                acc += chi as f64 * digamma(a as f64 / kf)?;
            }
        }
        return Ok(Complex64::new(-acc / kf, 0.0));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 1..k {
        let chi = kronecker(d0, a);
        if chi != 0 {
            acc += hurwitz_zeta(s, a as f64 / kf)? * chi as f64;
        }
    }
    Ok(acc * (-s * kf.ln()).exp())
}

/// Rotation angle for the smoothed functional equation; keeps the terms of
/// the same size as `Lambda(s) delta^{-s}` at large `|Im s|`.
fn rotation(t: f64) -> f64 {
    if t.abs() <= 3.0 / (PI / 4.0) {
        0.0
    } else {
        t.signum() * (PI / 4.0 - 3.0 / t.abs())
    }
}

/// Uses Lambda(s) = Q^s Gamma((s+p)/2) L(s), Q = sqrt(k/pi), root number 1
/// and, with delta = e^{i theta},
/// Lambda(s) delta^{-s} = sum chi(n) [w^{-s} Gamma((s+p)/2, w^2)
///                       + delta^{-1} v^{s-1} Gamma((1-s+p)/2, v^2)],
/// w = n delta / Q, v = n / (delta Q).
fn via_functional_equation(s: Complex64, d0: i64, k: u64) -> Result<Complex64> {
    let parity = if d0 < 0 { 1.0 } else { 0.0 };
    let q = (k as f64 / PI).sqrt();
    let theta = rotation(s.im);
    let cos2 = (2.0 * theta).cos();
    let n_max = (q * (46.0 / cos2).sqrt()).ceil() as u64 + 1;
    let one = Complex64::new(1.0, 0.0);
    let z1 = (s + parity) * 0.5;
    let z2 = (one - s + parity) * 0.5;
    let delta_inv = Complex64::from_polar(1.0, -theta);
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=n_max {
        let chi = kronecker(d0, n);
        if chi == 0 {
            continue;
        }
        let ln_r = (n as f64 / q).ln();
        let ln_w = Complex64::new(ln_r, theta);
        let ln_v = Complex64::new(ln_r, -theta);
        let t1 = (-s * ln_w).exp() * upper_incomplete_gamma(z1, (ln_w * 2.0).exp())?;
        let t2 = ((s - one) * ln_v).exp() * upper_incomplete_gamma(z2, (ln_v * 2.0).exp())?;
        acc += (t1 + delta_inv * t2) * chi as f64;
    }
    let ln_prefactor = Complex64::new(0.0, theta) * s - s * q.ln();
    Ok(acc * ln_prefactor.exp() / complex_gamma(z1)?)
}
