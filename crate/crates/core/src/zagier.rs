//! Zagier L-series `L_D(s) = zeta(2s)/zeta(s) * sum_q c_q(D) q^{-s}` with
//! `c_q(D) = #{r mod 2q : r^2 = D (mod 4q)}`, evaluated through the finite
//! decomposition `L(s, chi_D0) * sum_{d | f} mu(d) chi_D0(d) d^{-s} sigma_{1-2s}(f/d)`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{self, decompose_factored, factorize, kronecker, FactoredInteger, SpfSieve};
use crate::cache::{LValueStore, LruCache};
use crate::error::{Error, Result};
use crate::specfun::central::CentralValueKernel;
use crate::specfun::dirichlet_l;
use crate::{finite, ComplexValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LMethod {
    Decomposition,
    TruncatedSeries,
}

#[derive(Debug, Clone, Copy)]
pub struct ZagierLValue {
    pub n: u64,
    pub s: ComplexValue,
    pub value: ComplexValue,
    pub method: LMethod,
    pub error_estimate: f64,
}

/// Root counts `c_q` and Dirichlet coefficients `lambda_q` for `q = 1..=Q`
/// (index 0 unused).
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub n: u64,
    pub q_max: usize,
    pub c: Vec<u64>,
    pub lambda: Vec<i64>,
}

/// `n^2 - 4` together with its factorization, built from `n - 2` and `n + 2`.
pub fn trace_discriminant(n: u64) -> Result<FactoredInteger> {
    if n < 3 {
        return Err(Error::Domain(format!("trace n = {n} must be at least 3")));
    }
    if n > 3_037_000_000 {
        return Err(Error::Overflow("n^2 - 4"));
    }
    factorize(n - 2)?.mul(&factorize(n + 2)?)
}

fn trace_discriminant_sieved(n: u64, sieve: &SpfSieve) -> Result<FactoredInteger> {
    sieve.factorize_any(n - 2)?.mul(&sieve.factorize_any(n + 2)?)
}

/// Number of `r mod p^e` with `r^2 = d (mod p^e)`.
fn sqrt_count_prime_power(d: u128, p: u64, e: u32) -> u64 {
    let pe = (p as u128).pow(e);
    let mut u = d % pe;
    if u == 0 {
        return p.pow(e / 2);
    }
    let mut v = 0u32;
    while u.is_multiple_of(p as u128) {
        u /= p as u128;
        v += 1;
    }
    if v % 2 == 1 {
        return 0;
    }
    let k = e - v;
    let unit_count = if p == 2 {
        match k {
            1 => 1,
            2 => 2 * (u % 4 == 1) as u64,
            _ => 4 * (u % 8 == 1) as u64,
        }
    } else {
        (1 + arith::jacobi((u % p as u128) as u64, p)) as u64
    };
    unit_count * p.pow(v / 2)
}

fn root_count_factored(disc: u64, q: &FactoredInteger) -> u64 {
    // N(4q) / 2 with N multiplicative over the prime powers of 4q.
    let d = disc as u128;
    let mut count = 1u64;
    let mut saw_two = false;
    for &(p, e) in &q.factors {
        let e = if p == 2 {
            saw_two = true;
            e + 2
        } else {
            e
        };
        count *= sqrt_count_prime_power(d, p, e);
        if count == 0 {
            return 0;
        }
    }
    if !saw_two {
        count *= sqrt_count_prime_power(d, 2, 2);
    }
    count / 2
}

/// `c_q(D) = #{r in [1, 2q] : r^2 = D (mod 4q)}` via prime-power root counts.
pub fn root_count(disc: u64, q: u64) -> Result<u64> {
    if disc % 4 == 2 || disc % 4 == 3 {
        return Err(Error::InvalidDiscriminant(disc, "not 0 or 1 mod 4"));
    }
    if q == 0 {
        return Err(Error::Domain("root_count: q must be positive".into()));
    }
    Ok(root_count_factored(disc, &factorize(q)?))
}

/// Liouville function, the coefficients of `zeta(2s)/zeta(s)`.
fn liouville(f: &FactoredInteger) -> i64 {
    let omega: u32 = f.factors.iter().map(|&(_, e)| e).sum();
    if omega.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `lambda_q(D) = sum_{m | q} b_m c_{q/m}(D)` with `b` the Liouville function.
pub fn lambda_q(disc: u64, q: u64) -> Result<i64> {
    if disc % 4 == 2 || disc % 4 == 3 {
        return Err(Error::InvalidDiscriminant(disc, "not 0 or 1 mod 4"));
    }
    let fq = factorize(q)?;
    let mut acc = 0i64;
    for m in fq.divisors() {
        let fm = factorize(m)?;
        let fr = factorize(q / m)?;
        acc += liouville(&fm) * root_count_factored(disc, &fr) as i64;
    }
    Ok(acc)
}

/// Coefficients up to `q_max` for the discriminant `n^2 - 4`.
pub fn coefficient_table(n: u64, q_max: usize) -> Result<CoefficientTable> {
    let disc = trace_discriminant(n)?.value;
    Ok(coefficient_table_for_disc(n, disc, q_max))
}

fn coefficient_table_for_disc(n: u64, disc: u64, q_max: usize) -> CoefficientTable {
    let sieve = SpfSieve::new(q_max.max(2));
    let mut c = vec![0u64; q_max + 1];
    let mut b = vec![0i64; q_max + 1];
    for q in 1..=q_max {
        let fq = sieve.factorize(q as u64);
        c[q] = root_count_factored(disc, &fq);
        b[q] = liouville(&fq);
    }
    let mut lambda = vec![0i64; q_max + 1];
    for m in 1..=q_max {
        let bm = b[m];
        let mut k = 1;
        while m * k <= q_max {
            lambda[m * k] += bm * c[k] as i64;
            k += 1;
        }
    }
    CoefficientTable { n, q_max, c, lambda }
}

/// `sum_{d | f} mu(d) chi_D0(d) d^{-s} sigma_{1-2s}(f/d)`.
pub(crate) fn finite_factor(d0: u64, f: &FactoredInteger, s: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let z = one - s * 2.0;
    // Multiplicative in f: the local factor at p^e is
    // sigma_z(p^e) - chi(p) p^{-s} sigma_z(p^{e-1}).
    let mut acc = one;
    for &(p, e) in &f.factors {
        let pz = (z * (p as f64).ln()).exp();
        let mut sig_prev = one;
        let mut sig = one;
        let mut pow = one;
        for _ in 0..e {
            sig_prev = sig;
            pow *= pz;
            sig += pow;
        }
        let chi = kronecker(d0 as i64, p) as f64;
        acc *= sig - sig_prev * (-s * (p as f64).ln()).exp() * chi;
    }
    acc
}

/// `L_{n^2-4}(s)` by the finite decomposition, for `Re s > 0`.
pub fn zagier_l(n: u64, s: Complex64) -> Result<ZagierLValue> {
    let fd = trace_discriminant(n)?;
    zagier_l_factored(n, &fd, s)
}

fn zagier_l_factored(n: u64, fd: &FactoredInteger, s: Complex64) -> Result<ZagierLValue> {
    let dd = decompose_factored(fd)?;
    let f = factorize(dd.f)?;
    let l = dirichlet_l(s, dd.d0 as i64)?;
    let value = finite(l * finite_factor(dd.d0, &f, s), "zagier_L")?;
    let value = if s.im == 0.0 { Complex64::new(value.re, 0.0) } else { value };
    Ok(ZagierLValue {
        n,
        s,
        value,
        method: LMethod::Decomposition,
        error_estimate: 1e-10 * value.norm().max(1.0),
    })
}

/// `sum_{q <= Q} lambda_q q^{-s}` for `Re s > 1`, with a heuristic tail
/// estimate `(1 + log Q)^2 Q^{1 - sigma} / (sigma - 1)`.
pub fn zagier_l_series(n: u64, s: Complex64, q_max: usize) -> Result<ZagierLValue> {
    if !(s.re > 1.0) {
        return Err(Error::Domain(format!("truncated series needs Re(s) > 1, got {}", s.re)));
    }
    let table = coefficient_table(n, q_max)?;
    let terms: Vec<Complex64> = (1..=q_max)
        .map(|q| (-s * (q as f64).ln()).exp() * table.lambda[q] as f64)
        .collect();
    let value = crate::sum::pairwise_sum(&terms);
    let qf = q_max as f64;
    let error_estimate = (1.0 + qf.ln()).powi(2) * qf.powf(1.0 - s.re) / (s.re - 1.0);
    Ok(ZagierLValue { n, s, value, method: LMethod::TruncatedSeries, error_estimate })
}

/// Result of [`smoothed_series_sv`].
#[derive(Debug, Clone)]
pub struct SvValue {
    pub value: f64,
    pub q_max: usize,
    pub warning: Option<String>,
}

/// `S_V = sum_{q <= Q} lambda_q(n^2 - 4) / q * exp(-q / V)`.
pub fn smoothed_series_sv(n: u64, v: f64, q_max: usize) -> Result<SvValue> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("S_V: V = {v} must be positive")));
    }
    let table = coefficient_tables().get_or_build(n, q_max)?;
    Ok(sv_from_table(&table, v, q_max))
}

fn sv_from_table(table: &CoefficientTable, v: f64, q_max: usize) -> SvValue {
    let terms: Vec<f64> = (1..=q_max)
        .map(|q| table.lambda[q] as f64 / q as f64 * (-(q as f64) / v).exp())
        .collect();
    let warning = ((q_max as f64) < 20.0 * v)
        .then(|| format!("S_V truncated at Q = {q_max} < 20 V = {}", 20.0 * v));
    SvValue { value: crate::sum::pairwise_sum(&terms), q_max, warning }
}

/// Truncation used by [`afe_residual`]; `exp(-40)` is below 1e-17.
pub fn afe_truncation(v: f64) -> usize {
    (40.0 * v).ceil().max(20.0) as usize
}

/// `L_{n^2-4}(1) - S_V`.
pub fn afe_residual(n: u64, v: f64) -> Result<f64> {
    let l1 = zagier_l(n, Complex64::new(1.0, 0.0))?.value.re;
    Ok(l1 - smoothed_series_sv(n, v, afe_truncation(v))?.value)
}

/// LRU cache of coefficient tables shared by the S_V evaluations.
pub struct CoefficientCache {
    inner: LruCache<(u64, usize), Arc<CoefficientTable>>,
}

impl CoefficientCache {
    pub const BUDGET_BYTES: usize = 256 << 20;

    fn table_bytes(q_max: usize) -> usize {
        16 * (q_max + 1)
    }

    pub fn get_or_build(&self, n: u64, q_max: usize) -> Result<Arc<CoefficientTable>> {
        if let Some(t) = self.inner.find(|(tn, tq)| tn == n && tq >= q_max) {
            return Ok(t);
        }
        let table = Arc::new(coefficient_table(n, q_max)?);
        self.inner.insert((n, q_max), table.clone(), Self::table_bytes(q_max));
        Ok(table)
    }
}

pub fn coefficient_tables() -> &'static CoefficientCache {
    static CACHE: std::sync::OnceLock<CoefficientCache> = std::sync::OnceLock::new();
    CACHE.get_or_init(|| CoefficientCache { inner: LruCache::new(CoefficientCache::BUDGET_BYTES) })
}

/// One row of [`subconvexity_scan`].
#[derive(Debug, Clone, Copy)]
pub struct SubconvexityRow {
    pub n: u64,
    pub abs_l: f64,
    pub normalized: f64,
}

/// `L_{n^2-4}(1/2)` for all traces in `lo..=hi`, using the batch kernel
/// where the discriminant allows it.
pub fn central_values(lo: u64, hi: u64) -> Result<Vec<f64>> {
    let lo = lo.max(3);
    if hi < lo {
        return Ok(Vec::new());
    }
    let max_disc = hi.checked_mul(hi).ok_or(Error::Overflow("n^2 - 4"))? - 4;
    let kernel = CentralValueKernel::new(max_disc.min(CentralValueKernel::MAX_DISC))?;
    let sieve = SpfSieve::new((hi + 2).min(50_000_000) as usize);
    central_values_with(lo, hi, &kernel, &sieve)
}

pub fn central_values_with(lo: u64, hi: u64, kernel: &CentralValueKernel, sieve: &SpfSieve) -> Result<Vec<f64>> {
    let half = Complex64::new(0.5, 0.0);
    (lo..=hi)
        .into_par_iter()
        .map_init(Vec::new, |scratch, n| {
            let fd = trace_discriminant_sieved(n, sieve)?;
            let dd = decompose_factored(&fd)?;
            if dd.d0 > CentralValueKernel::MAX_DISC {
                return Ok(zagier_l_factored(n, &fd, half)?.value.re);
            }
            let l = kernel.eval(dd.d0, scratch)?;
            let f = sieve.factorize_any(dd.f)?;
            Ok(l * finite_factor(dd.d0, &f, half).re)
        })
        .collect()
}

/// `L_{n^2-4}(1/2 + it)` for all traces in `lo..=hi`.
pub fn critical_line_values(lo: u64, hi: u64, t: f64) -> Result<Vec<Complex64>> {
    if t == 0.0 {
        return Ok(central_values(lo, hi)?.into_iter().map(|v| Complex64::new(v, 0.0)).collect());
    }
    let s = Complex64::new(0.5, t);
    (lo.max(3)..=hi).into_par_iter().map(|n| Ok(zagier_l(n, s)?.value)).collect()
}

/// Extends `store` up to trace `n_max` in chunks, appending after each chunk.
/// Stops early (keeping what was written) once `keep_going` returns false.
pub fn extend_store(
    store: &mut LValueStore,
    n_max: u64,
    chunk: u64,
    keep_going: impl Fn() -> bool,
    mut progress: impl FnMut(u64),
) -> Result<()> {
    let chunk = chunk.max(1);
    let t = store.t();
    let kernel_sieve = if t == 0.0 && n_max > store.max_trace() {
        let max_disc = n_max.checked_mul(n_max).ok_or(Error::Overflow("n^2 - 4"))? - 4;
        Some((
            CentralValueKernel::new(max_disc.min(CentralValueKernel::MAX_DISC))?,
            SpfSieve::new((n_max + 2).min(50_000_000) as usize),
        ))
    } else {
        None
    };
    while store.max_trace() < n_max {
        if !keep_going() {
            return Err(Error::Interrupted);
        }
        let lo = store.max_trace() + 1;
        let hi = (lo + chunk - 1).min(n_max);
        let values: Vec<Complex64> = match &kernel_sieve {
            Some((kernel, sieve)) => central_values_with(lo, hi, kernel, sieve)?
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect(),
            None => critical_line_values(lo, hi, t)?,
        };
        store.append(&values)?;
        progress(hi);
    }
    Ok(())
}

/// `(n, |L_{n^2-4}(1/2)|, |L| / n^{1/3})` for `3 <= n <= n_max`.
pub fn subconvexity_scan(n_max: u64) -> Result<Vec<SubconvexityRow>> {
    if n_max > 100_000 {
        return Err(Error::Precondition(format!("subconvexity scan limited to N_max <= 1e5, got {n_max}")));
    }
    let values = central_values(3, n_max)?;
    Ok(values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let n = i as u64 + 3;
            SubconvexityRow { n, abs_l: v.abs(), normalized: v.abs() / (n as f64).cbrt() }
        })
        .collect())
}
