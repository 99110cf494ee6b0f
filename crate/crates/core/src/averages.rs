//! Partial sums of `L_{n^2-4}(1/2 + it)` over traces, the main-term density
//! `m_t`, the error term `E_t(X)` and scans over it.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cache::LValueStore;
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_breaks};
use crate::specfun::{complex_gamma, riemann_zeta, zeta_derivative, EULER_GAMMA};
use crate::sum::pairwise_sum;
use crate::zagier::critical_line_values;
use crate::{finite, ComplexValue};

pub const MAX_T: f64 = 100.0;
pub const MAX_PARTIAL_SUM_X: f64 = 1e7;

/// Constants of the density `m_t(x) = constant + coefficient * g_t(x)` with
/// `g_0(x) = log(x^2 - 4)` and `g_t(x) = (x^2 - 4)^{-it}` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityParams {
    pub t: f64,
    pub zeta_3_2: f64,
    pub zeta_prime_3_2: f64,
    pub euler_gamma: f64,
    pub constant: ComplexValue,
    pub coefficient: ComplexValue,
}

/// `zeta(it)` from the functional equation against `zeta(1 - it)`.
fn zeta_imaginary_axis(t: f64) -> Result<Complex64> {
    let s = Complex64::new(0.0, t);
    let one = Complex64::new(1.0, 0.0);
    let factor = Complex64::new(2.0, 0.0).powc(s) * Complex64::new(PI, 0.0).powc(s - one) * (s * (PI / 2.0)).sin();
    Ok(factor * complex_gamma(one - s)? * riemann_zeta(one - s)?)
}

impl DensityParams {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() || t.abs() > MAX_T {
            return Err(Error::Precondition(format!("|t| <= {MAX_T} required, got {t}")));
        }
        let z = riemann_zeta(Complex64::new(1.5, 0.0))?.re;
        let dz = zeta_derivative(Complex64::new(1.5, 0.0))?.re;
        let (constant, coefficient) = if t == 0.0 {
            let c = (-PI / 2.0 + 3.0 * EULER_GAMMA - 2.0 * dz / z - (8.0 * PI).ln()) / (2.0 * z);
            (Complex64::new(c, 0.0), Complex64::new(1.0 / (2.0 * z), 0.0))
        } else {
            let it = Complex64::new(0.0, t);
            let first = riemann_zeta(Complex64::new(1.0, 2.0 * t))? / riemann_zeta(Complex64::new(1.5, t))?;
            let second = Complex64::new(2.0, 0.0).powc(it + 0.5)
                * ((it + 0.5) * (PI / 2.0)).sin()
                * Complex64::new(PI, 0.0).powc(-it)
                * zeta_imaginary_axis(t)?
                / riemann_zeta(Complex64::new(1.5, -t))?
                * complex_gamma(it)?;
            (finite(first, "m_t constant")?, finite(second, "m_t coefficient")?)
        };
        Ok(DensityParams { t, zeta_3_2: z, zeta_prime_3_2: dz, euler_gamma: EULER_GAMMA, constant, coefficient })
    }

    /// `m_t(x)` for `x > 2`.
    pub fn m(&self, x: f64) -> Complex64 {
        let w = x * x - 4.0;
        if self.t == 0.0 {
            self.constant + self.coefficient * w.ln()
        } else {
            self.constant + self.coefficient * Complex64::from_polar(1.0, -self.t * w.ln())
        }
    }

    /// `m_t(2 cosh v) * 2 sinh v`, the integrand after `u = 2 cosh v`.
    fn m_substituted(&self, v: f64) -> Complex64 {
        let sh = v.sinh();
        let log_w = 2.0 * (2.0 * sh).ln();
        let g = if self.t == 0.0 { Complex64::new(log_w, 0.0) } else { Complex64::from_polar(1.0, -self.t * log_w) };
        (self.constant + self.coefficient * g) * (2.0 * sh)
    }

    /// `int_2^x m_0(u) du` from the antiderivative of `log(u^2 - 4)`.
    /// Only meaningful for `t = 0`.
    pub fn main_term_t0_closed(&self, x: f64) -> f64 {
        debug_assert!(self.t == 0.0);
        let f = |u: f64| {
            let lo = if u > 2.0 { (u - 2.0) * (u - 2.0).ln() } else { 0.0 };
            lo + (u + 2.0) * (u + 2.0).ln() - 2.0 * u
        };
        self.constant.re * (x - 2.0) + self.coefficient.re * (f(x) - f(2.0))
    }

    /// `int_a^b m_t(u) du` for `2 <= a <= b`.
    pub fn integral_between(&self, a: f64, b: f64) -> Result<Complex64> {
        if b <= a {
            return Ok(Complex64::default());
        }
        if a >= 3.0 {
            let tol = 1e-13 * (b - a).max(1.0);
            return integrate(|u| self.m(u), a, b, tol, 1e-14);
        }
        let (va, vb) = ((a / 2.0).acosh(), (b / 2.0).acosh());
        let mut breaks = vec![va];
        // Geometric breaks resolve the log singularity and the (u^2-4)^{-it}
        // oscillation as v -> 0; unit breaks keep panels short further out.
        let mut p = 1e-12;
        while p < 1.0 {
            if p > va && p < vb {
                breaks.push(p);
            }
            p *= 2.0;
        }
        let mut q = 1.0;
        while q < vb {
            if q > va {
                breaks.push(q);
            }
            q += 0.25;
        }
        breaks.push(vb);
        let tol = 1e-11 * b;
        integrate_breaks(|v| self.m_substituted(v), &breaks, tol, 1e-13)
    }
}

pub fn density_m(x: f64, t: f64) -> Result<ComplexValue> {
    if !(x > 2.0) {
        return Err(Error::Domain(format!("m_t(x) requires x > 2, got {x}")));
    }
    finite(DensityParams::new(t)?.m(x), "m_t")
}

/// `int_2^X m_t(u) du` by adaptive quadrature in `u = 2 cosh v`.
pub fn main_term_integral(x: f64, t: f64) -> Result<ComplexValue> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(Error::Domain(format!("main term requires X >= 2, got {x}")));
    }
    DensityParams::new(t)?.integral_between(2.0, x)
}

fn check_sum_range(x: f64) -> Result<u64> {
    if !x.is_finite() || x > MAX_PARTIAL_SUM_X {
        return Err(Error::Precondition(format!("partial sums limited to X <= 1e7, got {x}")));
    }
    Ok(if x < 3.0 { 2 } else { x.floor() as u64 })
}

/// `sum_{3 <= n <= X} L_{n^2-4}(1/2 + it)`.
pub fn partial_sum(x: f64, t: f64) -> Result<ComplexValue> {
    let n_max = check_sum_range(x)?;
    if n_max < 3 {
        return Ok(Complex64::default());
    }
    Ok(pairwise_sum(&critical_line_values(3, n_max, t)?))
}

/// Prefix sums `S(n) = sum_{3 <= k <= n} L_{k^2-4}(1/2 + it)` up to `n_max`.
#[derive(Debug, Clone)]
pub struct PrefixSums {
    t: f64,
    prefix: Vec<Complex64>,
}

impl PrefixSums {
    /// `values[i]` is the L-value for trace `3 + i`.
    pub fn from_values(t: f64, values: &[Complex64]) -> Self {
        let mut prefix = Vec::with_capacity(values.len() + 1);
        let (mut s, mut c) = (Complex64::default(), Complex64::default());
        prefix.push(s);
        for &v in values {
            let (re, cr) = neumaier(s.re, c.re, v.re);
            let (im, ci) = neumaier(s.im, c.im, v.im);
            s = Complex64::new(re, im);
            c = Complex64::new(cr, ci);
            prefix.push(s + c);
        }
        PrefixSums { t, prefix }
    }

    pub fn compute(t: f64, n_max: u64) -> Result<Self> {
        check_sum_range(n_max as f64)?;
        Ok(Self::from_values(t, &critical_line_values(3, n_max, t)?))
    }

    pub fn from_store(store: &LValueStore, n_max: u64) -> Result<Self> {
        if store.max_trace() < n_max {
            return Err(Error::Precondition(format!(
                "L-value cache holds traces up to {}, need {n_max}",
                store.max_trace()
            )));
        }
        let len = n_max.saturating_sub(2) as usize;
        Ok(Self::from_values(store.t(), &store.values()[..len]))
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n_max(&self) -> u64 {
        self.prefix.len() as u64 + 1
    }

    /// `S(floor(x))`; `x` must not exceed `n_max() + 1`.
    pub fn at(&self, x: f64) -> Result<Complex64> {
        let n = if x < 3.0 { 2 } else { x.floor() as u64 };
        self.prefix
            .get((n - 2) as usize)
            .copied()
            .ok_or_else(|| Error::Precondition(format!("prefix sums end at n = {}, asked for {n}", self.n_max())))
    }
}

fn neumaier(sum: f64, comp: f64, x: f64) -> (f64, f64) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
    (t, comp + c)
}

/// `E_t(x) = S(x) - int_2^x m_t` at arbitrary real `x`.
#[derive(Debug, Clone)]
pub struct ErrorTerm {
    params: DensityParams,
    sums: PrefixSums,
    /// `int_2^n m_t` for integers `n = 2..=n_max+1` (only for `t != 0`).
    main_at_int: Vec<Complex64>,
}

impl ErrorTerm {
    pub fn new(sums: PrefixSums) -> Result<Self> {
        let params = DensityParams::new(sums.t())?;
        let main_at_int = if params.t == 0.0 {
            Vec::new()
        } else {
            let last = sums.n_max() + 1;
            let pieces: Vec<Complex64> = (2..last)
                .into_par_iter()
                .map(|n| params.integral_between(n as f64, n as f64 + 1.0))
                .collect::<Result<_>>()?;
            let mut acc = Vec::with_capacity(pieces.len() + 1);
            let (mut s, mut c) = (Complex64::default(), Complex64::default());
            acc.push(s);
            for p in pieces {
                let (re, cr) = neumaier(s.re, c.re, p.re);
                let (im, ci) = neumaier(s.im, c.im, p.im);
                s = Complex64::new(re, im);
                c = Complex64::new(cr, ci);
                acc.push(s + c);
            }
            acc
        };
        Ok(ErrorTerm { params, sums, main_at_int })
    }

    pub fn params(&self) -> &DensityParams {
        &self.params
    }

    pub fn sums(&self) -> &PrefixSums {
        &self.sums
    }

    /// Largest `x` accepted by [`ErrorTerm::eval`].
    pub fn x_max(&self) -> f64 {
        self.sums.n_max() as f64
    }

    pub fn main_term(&self, x: f64) -> Result<Complex64> {
        if !(x >= 2.0) || x > self.x_max() {
            return Err(Error::Precondition(format!("x = {x} outside [2, {}]", self.x_max())));
        }
        if self.params.t == 0.0 {
            return Ok(Complex64::new(self.params.main_term_t0_closed(x), 0.0));
        }
        let n = x.floor();
        let base = self.main_at_int[(n as usize).saturating_sub(2).min(self.main_at_int.len() - 1)];
        Ok(base + self.params.integral_between(n, x)?)
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        Ok(self.sums.at(x)? - self.main_term(x)?)
    }

    /// Left limit `E(n^-)` at an integer `n >= 3`.
    pub fn eval_left(&self, n: u64) -> Result<Complex64> {
        Ok(self.sums.at(n as f64 - 1.0)? - self.main_term(n as f64)?)
    }

    pub fn record(&self, x: f64) -> Result<ScanRecord> {
        let partial_sum = self.sums.at(x)?;
        let main_term = self.main_term(x)?;
        Ok(ScanRecord::new(x, partial_sum, main_term))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRecord {
    pub x: f64,
    pub partial_sum: ComplexValue,
    pub main_term: ComplexValue,
    pub error: ComplexValue,
    pub normalized: f64,
}

impl ScanRecord {
    pub fn new(x: f64, partial_sum: Complex64, main_term: Complex64) -> Self {
        let error = partial_sum - main_term;
        ScanRecord { x, partial_sum, main_term, error, normalized: error.norm() / x.sqrt() }
    }
}

pub const SCAN_CSV_HEADER: &str = "X,sum_re,sum_im,main_re,main_im,err_re,err_im,normalized";

pub fn write_scan_csv<W: Write>(mut w: W, records: &[ScanRecord]) -> std::io::Result<()> {
    writeln!(w, "{SCAN_CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.x,
            r.partial_sum.re,
            r.partial_sum.im,
            r.main_term.re,
            r.main_term.im,
            r.error.re,
            r.error.im,
            r.normalized
        )?;
    }
    Ok(())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Precondition("X grid must be ascending".into()));
    }
    if let Some(&x) = grid.iter().find(|&&x| !(x >= 2.0)) {
        return Err(Error::Domain(format!("grid point {x} below 2")));
    }
    Ok(())
}

/// One record per grid point from a shared prefix-sum pass.
pub fn error_scan(grid: &[f64], t: f64) -> Result<Vec<ScanRecord>> {
    check_grid(grid)?;
    let Some(&last) = grid.last() else { return Ok(Vec::new()) };
    let sums = PrefixSums::compute(t, check_sum_range(last)?)?;
    error_scan_with(&sums, grid)
}

pub fn error_scan_with(sums: &PrefixSums, grid: &[f64]) -> Result<Vec<ScanRecord>> {
    check_grid(grid)?;
    let params = DensityParams::new(sums.t())?;
    grid.par_iter()
        .map(|&x| Ok(ScanRecord::new(x, sums.at(x)?, params.integral_between(2.0, x)?)))
        .collect()
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|i| if i + 1 == n { hi } else { (a + (b - a) * i as f64 / (n - 1) as f64).exp() }).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least squares of `log|error|` against `log X` over records with nonzero error.
pub fn exponent_fit(records: &[ScanRecord]) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.error.norm() > 0.0 && r.x > 0.0)
        .map(|r| (r.x.ln(), r.error.norm().ln()))
        .collect();
    if pts.len() < 10 {
        return Err(Error::Validation(format!("exponent fit needs >= 10 nonzero errors, got {}", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if pts.iter().all(|p| p.0 == pts[0].0) || !(sxx > 0.0) {
        return Err(Error::Validation("exponent fit is degenerate: all X equal".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(ExponentFit { slope, intercept: my - slope * mx, r_squared })
}

/// Supremum of `|E_t(x)| / sqrt(x)` over one range of integers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaWindow {
    pub lo: u64,
    pub hi: u64,
    pub max_normalized: f64,
    pub argmax: f64,
}

/// Scans `[lo, hi]` at every jump: both `E(n)` and the left limit `E(n^-)`.
pub fn omega_sup(err: &ErrorTerm, lo: u64, hi: u64) -> Result<OmegaWindow> {
    let lo = lo.max(3);
    if hi < lo || hi as f64 > err.x_max() {
        return Err(Error::Precondition(format!("window [{lo}, {hi}] outside [3, {}]", err.x_max())));
    }
    let best = (lo..=hi)
        .into_par_iter()
        .map(|n| {
            let x = n as f64;
            let right = err.eval(x)?.norm() / x.sqrt();
            let left = if n > lo { err.eval_left(n)?.norm() / x.sqrt() } else { 0.0 };
            Ok(if left > right { (left, x) } else { (right, x) })
        })
        .collect::<Result<Vec<(f64, f64)>>>()?
        .into_iter()
        .fold((0.0, lo as f64), |a, b| if b.0 > a.0 { b } else { a });
    Ok(OmegaWindow { lo, hi, max_normalized: best.0, argmax: best.1 })
}

/// Decade windows `[10^k, 10^{k+1}]` for each `k` in `decades`.
pub fn omega_scan(err: &ErrorTerm, decades: impl IntoIterator<Item = u32>) -> Result<Vec<OmegaWindow>> {
    decades.into_iter().map(|k| omega_sup(err, 10u64.pow(k), 10u64.pow(k + 1))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{dirichlet_l_route, LRoute};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn constants_match_reference() {
        let p = DensityParams::new(0.0).unwrap();
        assert!((p.zeta_3_2 - 2.612_375_348_685_488).abs() < 1e-10);
        assert!((p.zeta_prime_3_2 + 3.932_239_737_431_101_5).abs() < 1e-10);
        assert_eq!(p.constant.im, 0.0);
        assert_eq!(p.coefficient.im, 0.0);
    }

    #[test]
    fn density_values() {
        let x = (4.0 + 8.0 * PI).sqrt();
        let p = DensityParams::new(0.0).unwrap();
        let want = (-PI / 2.0 + 3.0 * EULER_GAMMA - 2.0 * p.zeta_prime_3_2 / p.zeta_3_2) / (2.0 * p.zeta_3_2);
        assert!((density_m(x, 0.0).unwrap().re - want).abs() < 1e-13);
        // mpmath at 30 digits.
        assert!((density_m(10.0, 0.0).unwrap().re - 0.863_485_820_614_362).abs() < 1e-12);
        let m = density_m(10.0, 0.5).unwrap();
        assert!(close(m, Complex64::new(1.146_972_419_908_733, -0.433_464_441_753_649), 1e-10), "{m}");
        let m = density_m(7.5, 3.0).unwrap();
        assert!(close(m, Complex64::new(1.622_774_177_967_488, 0.189_232_596_357_834), 1e-10), "{m}");
        assert!(density_m(2.0, 0.0).is_err());
        assert!(density_m(3.0, 101.0).is_err());
    }

    #[test]
    fn main_term_matches_references() {
        assert_eq!(main_term_integral(2.0, 0.0).unwrap(), Complex64::default());
        let i = main_term_integral(10.0, 0.0).unwrap();
        assert!((i.re - 4.686_622_524_284_725).abs() < 1e-10, "{i}");
        let i = main_term_integral(10.0, 0.5).unwrap();
        assert!(close(i, Complex64::new(8.120_291_127_959_552, -0.424_263_629_400_923), 1e-9), "{i}");
        let i = main_term_integral(1000.0, 0.5).unwrap();
        assert!(close(i, Complex64::new(254.654_389_515_483_95, 113.796_936_682_492_13), 1e-8), "{i}");
    }

    #[test]
    fn main_term_closed_form_and_additivity() {
        let p = DensityParams::new(0.0).unwrap();
        for x in [2.001, 2.5, 3.0, 10.0, 1e3, 1e5, 1e6] {
            let q = main_term_integral(x, 0.0).unwrap().re;
            assert!((q - p.main_term_t0_closed(x)).abs() <= 1e-8 * x, "x={x}");
        }
        for t in [0.0, 1.0, 20.0] {
            let p = DensityParams::new(t).unwrap();
            let whole = p.integral_between(2.0, 100.0).unwrap();
            let parts = p.integral_between(2.0, 10.0).unwrap() + p.integral_between(10.0, 100.0).unwrap();
            assert!(close(whole, parts, 1e-9), "t={t}");
        }
    }

    #[test]
    fn partial_sum_small_cases() {
        assert_eq!(partial_sum(2.5, 0.0).unwrap(), Complex64::default());
        let s = Complex64::new(0.5, 1.5);
        let one = partial_sum(3.0, 1.5).unwrap();
        assert!(close(one, crate::zagier::zagier_l(3, s).unwrap().value, 1e-12));
        assert!(partial_sum(2e7, 0.0).is_err());
    }

    #[test]
    fn partial_sum_against_hurwitz_route() {
        // Per-term oracle: L_D(1/2) = L(1/2, chi_{d0}) * finite factor, with
        // the L-function evaluated through Hurwitz zeta.
        let half = Complex64::new(0.5, 0.0);
        let mut oracle = 0.0;
        for n in 3..=100u64 {
            let d = n * n - 4;
            let dd = crate::arith::decompose_discriminant(d).unwrap();
            let l = dirichlet_l_route(half, dd.d0 as i64, LRoute::Hurwitz).unwrap();
            let f = crate::arith::factorize(dd.f).unwrap();
            oracle += (l * crate::zagier::finite_factor(dd.d0, &f, half)).re;
        }
        let s = partial_sum(100.0, 0.0).unwrap();
        assert!(s.im.abs() < 1e-12);
        assert!((s.re - oracle).abs() < 1e-9 * oracle.abs(), "{} vs {oracle}", s.re);
    }

    #[test]
    fn incremental_scan_equals_single_shot() {
        let grid = [10.0, 55.5, 100.0, 400.0];
        let recs = error_scan(&grid, 0.0).unwrap();
        assert_eq!(recs.len(), 4);
        for r in &recs {
            let single = partial_sum(r.x, 0.0).unwrap();
            assert!(close(r.partial_sum, single, 1e-11 * single.norm()), "X={}", r.x);
            assert_eq!(r.error, r.partial_sum - r.main_term);
            assert!(r.error.im.abs() < 1e-12);
        }
        assert!(error_scan(&[100.0, 10.0], 0.0).is_err());
    }

    #[test]
    fn error_changes_by_main_term_between_integers() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for t in [0.0, 2.0] {
            let err = ErrorTerm::new(PrefixSums::compute(t, 400).unwrap()).unwrap();
            let p = *err.params();
            for _ in 0..20 {
                let n = rng.gen_range(3..400) as f64;
                let (a, b) = (n + rng.gen::<f64>() * 0.5, n + 0.5 + rng.gen::<f64>() * 0.49);
                let de = err.eval(b).unwrap() - err.eval(a).unwrap();
                let im = p.integral_between(a, b).unwrap();
                assert!(close(de, -im, 1e-10), "t={t} a={a} b={b}");
            }
        }
    }

    #[test]
    fn error_term_matches_direct_records() {
        let err = ErrorTerm::new(PrefixSums::compute(1.0, 300).unwrap()).unwrap();
        for x in [3.0, 17.25, 150.0, 299.9] {
            let direct = ScanRecord::new(x, partial_sum(x, 1.0).unwrap(), main_term_integral(x, 1.0).unwrap());
            assert!(close(err.eval(x).unwrap(), direct.error, 1e-9), "x={x}");
        }
        assert!(err.eval(400.0).is_err());
    }

    #[test]
    fn exponent_fit_synthetic() {
        let rec = |x: f64, e: f64| ScanRecord::new(x, Complex64::new(e, 0.0), Complex64::default());
        let xs = log_grid(10.0, 1e6, 20);
        let fit = exponent_fit(&xs.iter().map(|&x| rec(x, x.sqrt())).collect::<Vec<_>>()).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-9 && fit.intercept.abs() < 1e-9);
        let fit = exponent_fit(&xs.iter().map(|&x| rec(x, 3.0 * x.powf(0.7))).collect::<Vec<_>>()).unwrap();
        assert!((fit.slope - 0.7).abs() < 1e-9 && (fit.intercept - 3f64.ln()).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(exponent_fit(&xs.iter().map(|&x| rec(x, 0.0)).collect::<Vec<_>>()).is_err());
        assert!(exponent_fit(&[rec(10.0, 1.0); 12]).is_err());
    }

    #[test]
    fn omega_sup_sees_left_limits() {
        let err = ErrorTerm::new(PrefixSums::compute(0.0, 2000).unwrap()).unwrap();
        let w = omega_sup(&err, 100, 1000).unwrap();
        let mut brute: f64 = 0.0;
        for n in 100..=1000u64 {
            brute = brute.max(err.eval(n as f64).unwrap().norm() / (n as f64).sqrt());
            if n > 100 {
                brute = brute.max(err.eval(n as f64 - 1e-9).unwrap().norm() / (n as f64).sqrt());
            }
        }
        assert!((w.max_normalized - brute).abs() < 1e-6);
        assert!(omega_sup(&err, 100, 5000).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let mut out = Vec::new();
        write_scan_csv(&mut out, &[ScanRecord::new(4.0, Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0))]).unwrap();
        let s = String::from_utf8(out).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some(SCAN_CSV_HEADER));
        assert_eq!(lines.next().unwrap().split(',').count(), 8);
    }
}
