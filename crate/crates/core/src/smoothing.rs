//! Bump functions, smooth indicators, the window `omega_X`, the smoothed
//! error term computed two ways, and the Gaussian window.

use std::sync::OnceLock;

use crate::averages::{ErrorTerm, PrefixSums};
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_breaks, integrate_pieces};

pub const MAX_SMOOTHED_X: f64 = 1e5;

fn phi_shape(t: f64) -> f64 {
    let w = 1.0 - t * t;
    if w <= 0.0 {
        0.0
    } else {
        (-1.0 / w).exp()
    }
}

fn psi_shape(v: f64) -> f64 {
    let w = (2.0 * v - 1.0) * (2.0 - v);
    if w <= 0.0 || v <= 0.5 {
        0.0
    } else {
        (-1.0 / w).exp()
    }
}

fn phi_norm() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let z: f64 = integrate(phi_shape, -1.0, 1.0, 1e-15, 1e-15).expect("bump normalization converges");
        1.0 / z
    })
}

fn psi_norm() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let z: f64 = integrate(|v| psi_shape(v) / v, 0.5, 2.0, 1e-15, 1e-15).expect("bump normalization converges");
        1.0 / z
    })
}

/// Base bump `phi(t) = C exp(-1/(1-t^2))` on `(-1, 1)` with unit integral.
pub fn phi(t: f64) -> f64 {
    phi_norm() * phi_shape(t)
}

/// Base bump `psi(v) = C' exp(-1/((2v-1)(2-v)))` on `(1/2, 2)` with
/// `int psi(v) dv/v = 1`.
pub fn psi(v: f64) -> f64 {
    psi_norm() * psi_shape(v)
}

pub fn phi_delta(t: f64, delta: f64) -> f64 {
    phi(t / delta) / delta
}

/// `psi_delta(v) = psi(v^{1/delta}) / delta`, supported on `[2^-delta, 2^delta]`.
pub fn psi_delta(v: f64, delta: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    psi(v.powf(1.0 / delta)) / delta
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpKind {
    /// `phi_delta`, unit integral against `dt`.
    Additive,
    /// `psi_delta`, unit integral against `dv/v`.
    Multiplicative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    pub delta: f64,
    pub kind: BumpKind,
}

impl BumpSpec {
    pub fn new(delta: f64, kind: BumpKind) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Domain(format!("bump width must be positive, got {delta}")));
        }
        Ok(BumpSpec { delta, kind })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            BumpKind::Additive => phi_delta(x, self.delta),
            BumpKind::Multiplicative => psi_delta(x, self.delta),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            BumpKind::Additive => (-self.delta, self.delta),
            BumpKind::Multiplicative => (2f64.powf(-self.delta), 2f64.powf(self.delta)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowParams {
    pub x: f64,
    pub delta1: f64,
    pub delta2: f64,
}

impl WindowParams {
    pub fn new(x: f64, delta1: f64, delta2: f64) -> Result<Self> {
        if !(x > 2.0) || !x.is_finite() {
            return Err(Error::Domain(format!("window needs X > 2, got {x}")));
        }
        for (name, d) in [("delta1", delta1), ("delta2", delta2)] {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::Domain(format!("{name} must lie in (0, 1], got {d}")));
            }
        }
        Ok(WindowParams { x, delta1, delta2 })
    }

    /// Closed interval outside which `omega_X` vanishes.
    pub fn support(&self) -> (f64, f64) {
        (
            2f64.powf(-self.delta1) * self.x - self.delta2,
            2f64.powf(1.0 + self.delta1) * self.x + self.delta2,
        )
    }

    /// Interval on which `omega_X = 1`; empty when `lo > hi`.
    pub fn plateau(&self) -> (f64, f64) {
        (
            2f64.powf(self.delta1) * self.x + self.delta2,
            2f64.powf(1.0 - self.delta1) * self.x - self.delta2,
        )
    }

    fn y_range(&self) -> (f64, f64) {
        (2f64.powf(-self.delta1) * self.x, 2f64.powf(self.delta1) * self.x)
    }

    fn weight(&self, y: f64) -> f64 {
        psi_delta(y / self.x, self.delta1) / y
    }
}

/// `(phi_delta * 1_{]y, 2y]})(t)`, integrating over the overlap only.
pub fn smooth_indicator(t: f64, y: f64, delta2: f64) -> Result<f64> {
    if !(y > delta2) {
        return Err(Error::Precondition(format!("smooth indicator needs y > delta2, got y = {y}")));
    }
    let lo = y.max(t - delta2);
    let hi = (2.0 * y).min(t + delta2);
    if hi <= lo {
        return Ok(0.0);
    }
    if lo <= t - delta2 && hi >= t + delta2 {
        return Ok(1.0);
    }
    integrate(|w| phi_delta(t - w, delta2), lo, hi, 1e-14, 1e-14)
}

fn clip_sorted(mut pts: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    pts.retain(|p| *p > lo && *p < hi);
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `omega_X(t) = int psi_{delta1}(y/X) 1^sm_{delta2, ]y, 2y]}(t) dy/y`.
pub fn omega_window(t: f64, params: &WindowParams) -> Result<f64> {
    let (a, b) = params.support();
    if t <= a || t >= b {
        return Ok(0.0);
    }
    let (p, q) = params.plateau();
    if t >= p && t <= q {
        return Ok(1.0);
    }
    Ok(omega_window_quadrature(t, params)?.clamp(0.0, 1.0))
}

/// The defining integral of [`omega_window`] without the exact support and
/// plateau shortcuts.
pub fn omega_window_quadrature(t: f64, params: &WindowParams) -> Result<f64> {
    let d = params.delta2;
    let (ylo, yhi) = params.y_range();
    // The indicator is exactly 0 or 1 away from these four points.
    let breaks = clip_sorted(vec![t - d, t + d, (t - d) / 2.0, (t + d) / 2.0], ylo, yhi);
    let mut failure = None;
    let value = integrate_breaks(
        |y| {
            let w = params.weight(y);
            if w == 0.0 {
                return 0.0;
            }
            match smooth_indicator(t, y, d) {
                Ok(s) => w * s,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        &breaks,
        1e-13,
        1e-13,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    value
}

fn check_smoothed(params: &WindowParams) -> Result<()> {
    if params.x > MAX_SMOOTHED_X {
        return Err(Error::Precondition(format!("smoothed error limited to X <= 1e5, got {}", params.x)));
    }
    if params.support().0 < 2.0 {
        return Err(Error::Precondition("window support must lie in x >= 2".into()));
    }
    Ok(())
}

/// Trace range needed by the smoothed-error routines.
pub fn required_trace(params: &WindowParams) -> u64 {
    params.support().1.ceil() as u64 + 1
}

fn central_error_term(params: &WindowParams) -> Result<ErrorTerm> {
    ErrorTerm::new(PrefixSums::compute(0.0, required_trace(params))?)
}

/// Double quadrature of `psi_{delta1}(y/X) phi_{delta2}(v) (E_0(2y+v) - E_0(y+v))`.
pub fn smoothed_error_direct(params: &WindowParams) -> Result<f64> {
    check_smoothed(params)?;
    smoothed_error_direct_with(params, &central_error_term(params)?)
}

pub fn smoothed_error_direct_with(params: &WindowParams, err: &ErrorTerm) -> Result<f64> {
    check_smoothed(params)?;
    check_central(err, params)?;
    let d = params.delta2;
    let mut failure: Option<Error> = None;
    let inner = |y: f64| -> Result<f64> {
        // Jumps of E_0(2y+v) and E_0(y+v) inside [-d, d].
        let mut pts = Vec::new();
        for base in [y, 2.0 * y] {
            let mut k = (base - d).ceil();
            while k <= base + d {
                pts.push(k - base);
                k += 1.0;
            }
        }
        let breaks = clip_sorted(pts, -d, d);
        let mut fail = None;
        let v = integrate_breaks(
            |v| {
                let diff = err.eval(2.0 * y + v).and_then(|a| Ok(a - err.eval(y + v)?));
                match diff {
                    Ok(z) => phi_delta(v, d) * z.re,
                    Err(e) => {
                        fail.get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            &breaks,
            1e-11,
            1e-13,
        );
        match fail {
            Some(e) => Err(e),
            None => v,
        }
    };
    let (ylo, yhi) = params.y_range();
    // The inner integral is smooth in y except where a jump enters or
    // leaves [-d, d].
    let mut pts = Vec::new();
    let mut k = (ylo - d).floor();
    while k <= 2.0 * yhi + d {
        pts.extend([k - d, k + d, (k - d) / 2.0, (k + d) / 2.0]);
        k += 1.0;
    }
    let breaks = clip_sorted(pts, ylo, yhi);
    let value = integrate_pieces(
        |y| {
            let w = params.weight(y);
            if w == 0.0 || failure.is_some() {
                return 0.0;
            }
            match inner(y) {
                Ok(f) => w * f,
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            }
        },
        &breaks,
        1e-12,
        1e-12,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    value
}

/// `sum_n L_{n^2-4}(1/2) omega_X(n) - int m_0(u) omega_X(u) du`.
pub fn smoothed_error_via_window(params: &WindowParams) -> Result<f64> {
    check_smoothed(params)?;
    smoothed_error_via_window_with(params, &central_error_term(params)?)
}

pub fn smoothed_error_via_window_with(params: &WindowParams, err: &ErrorTerm) -> Result<f64> {
    check_smoothed(params)?;
    check_central(err, params)?;
    let sums = err.sums();
    let (a, b) = params.support();
    let (p, q) = params.plateau();
    let has_plateau = p < q;
    let (edge1, edge2) = if has_plateau { ((a, p), (q, b)) } else { ((a, b), (b, b)) };

    // Integers on the plateau contribute with weight exactly one.
    let mut total = 0.0;
    let mut sum_plateau = 0.0;
    if has_plateau && q.floor() >= p.ceil() {
        sum_plateau = (sums.at(q.floor())? - sums.at(p.ceil() - 1.0)?).re;
    }
    let l_at = |n: f64| -> Result<f64> { Ok((sums.at(n)? - sums.at(n - 1.0)?).re) };
    let mut edge_terms = Vec::new();
    for (lo, hi) in [edge1, edge2] {
        let mut n = lo.ceil().max(3.0);
        while n <= hi {
            if !(has_plateau && n >= p && n <= q) {
                edge_terms.push(l_at(n)? * omega_window(n, params)?);
            }
            n += 1.0;
        }
    }
    total += sum_plateau + crate::sum::pairwise_sum(&edge_terms);

    let m = err.params();
    let mut main = if has_plateau { m.integral_between(p, q)?.re } else { 0.0 };
    for (lo, hi) in [edge1, edge2] {
        if hi <= lo {
            continue;
        }
        let step = (params.delta2).max((hi - lo) / 16.0);
        let n = ((hi - lo) / step).ceil() as usize;
        let breaks: Vec<f64> = (0..=n).map(|i| if i == n { hi } else { lo + i as f64 * step }).collect();
        let mut failure = None;
        let v = integrate_pieces(
            |u| match omega_window(u, params) {
                Ok(0.0) => 0.0,
                Ok(w) => w * m.m(u).re,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            &breaks,
            1e-11,
            1e-13,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        main += v?;
    }
    Ok(total - main)
}

fn check_central(err: &ErrorTerm, params: &WindowParams) -> Result<()> {
    if err.params().t != 0.0 {
        return Err(Error::Precondition("smoothed error is defined for t = 0".into()));
    }
    if err.x_max() < params.support().1 + 1.0 {
        return Err(Error::Precondition(format!(
            "error term covers x <= {}, window needs {}",
            err.x_max(),
            params.support().1 + 1.0
        )));
    }
    Ok(())
}

/// One sampled window property against its bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowCheck {
    pub property: &'static str,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Samples `omega_X` on `samples` points per transition zone and reports the
/// range, the closed-form support and plateau (on the raw quadrature) and the
/// scaled derivative bounds `|omega'| delta1 X <= 3`, `|omega''| (delta1 X)^2 <= 30`.
pub fn window_checks(params: &WindowParams, samples: usize) -> Result<Vec<WindowCheck>> {
    let samples = samples.max(2);
    let (a, b) = params.support();
    let (lo, hi) = params.plateau();
    let scale = params.delta1 * params.x;
    let h = 0.25 * (scale / 10.0).min(1.0);
    let f = |t: f64| omega_window(t, params);

    let mut outside = 0.0f64;
    let mut range = 0.0f64;
    for k in 0..samples {
        let off = scale * k as f64 / samples as f64;
        for t in [a - off, b + off] {
            outside = outside.max(omega_window_quadrature(t, params)?.abs());
        }
    }
    let mut plateau = 0.0f64;
    if lo < hi {
        for k in 0..=samples {
            let t = lo + (hi - lo) * k as f64 / samples as f64;
            plateau = plateau.max((omega_window_quadrature(t, params)? - 1.0).abs());
        }
    }
    let (mut d1, mut d2) = (0.0f64, 0.0f64);
    for (s, e) in [(a, lo.min(hi)), (hi.max(lo), b)] {
        for k in 0..=samples {
            let t = s + (e - s) * k as f64 / samples as f64;
            let (fm, f0, fp) = (f(t - h)?, f(t)?, f(t + h)?);
            range = range.max(-f0).max(f0 - 1.0);
            d1 = d1.max((fp - fm).abs() / (2.0 * h) * scale);
            d2 = d2.max((fp - 2.0 * f0 + fm).abs() / (h * h) * scale * scale);
        }
    }
    let check = |property, value: f64, bound: f64| WindowCheck { property, value, bound, holds: value <= bound };
    Ok(vec![
        check("range", range, 0.0),
        check("support", outside, 1e-8),
        check("plateau", plateau, 1e-8),
        check("derivative", d1, 3.0),
        check("second_derivative", d2, 30.0),
    ])
}

/// `(1/(T sqrt(pi))) int_X^{2X} exp(-(x-K)^2/T^2) dK` via complementary error functions.
pub fn gaussian_window(x: f64, big_x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) || !(big_x > 0.0) {
        return Err(Error::Domain(format!("gaussian window needs X, T > 0, got X = {big_x}, T = {t}")));
    }
    Ok(0.5 * (libm::erfc((big_x - x) / t) - libm::erfc((2.0 * big_x - x) / t)))
}
