//! Kloosterman sums, the Linnik-type sum over moduli and the weighted double
//! sum over `n` and `q` built from the spectral test function.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{factorize, mod_inverse};
use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::smoothing::phi_delta;
use crate::spectral::{phi_test, test_function_params, TestFunctionParams};
use crate::sum::pairwise_sum;
use crate::{finite, ComplexValue};

pub const MAX_MODULUS: u64 = 10_000_000;
pub const MAX_LINNIK_C: f64 = 1e5;
pub const MAX_WEIGHTED_N: f64 = 1e3;
/// Terms with `exp(-4 pi n a / q)` below this are dropped.
pub const DAMPING_CUTOFF: f64 = 1e-12;
const PHASE_TABLE_MAX: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KloostermanValue {
    pub m: i64,
    pub n: i64,
    pub c: u64,
    pub value: ComplexValue,
}

/// Inverses of the units modulo `c` (0 marks a non-unit), by sieving out
/// multiples of the prime factors of `c` and one batched inversion.
pub fn unit_inverses(c: u64) -> Result<Vec<u32>> {
    if c == 0 || c > MAX_MODULUS {
        return Err(Error::Precondition(format!("modulus must lie in [1, 1e7], got {c}")));
    }
    if c == 1 {
        return Ok(vec![0]);
    }
    let mut unit = vec![true; c as usize];
    unit[0] = false;
    for (p, _) in factorize(c)?.factors.iter() {
        for k in (0..c as usize).step_by(*p as usize) {
            unit[k] = false;
        }
    }
    let units: Vec<u64> = (1..c).filter(|&x| unit[x as usize]).collect();
    let mut prefix = Vec::with_capacity(units.len());
    let mut acc = 1u64;
    for &x in &units {
        acc = acc * x % c;
        prefix.push(acc);
    }
    let mut inv_acc = mod_inverse(acc, c).ok_or(Error::Validation(format!("unit product not invertible mod {c}")))?;
    let mut inv = vec![0u32; c as usize];
    for i in (0..units.len()).rev() {
        let before = if i == 0 { 1 } else { prefix[i - 1] };
        inv[units[i] as usize] = (inv_acc * before % c) as u32;
        inv_acc = inv_acc * units[i] % c;
    }
    Ok(inv)
}

fn check_units(inv: &[u32], x: usize) -> bool {
    inv.len() == 1 || inv[x] != 0
}

fn phase(k: u64, c: u64) -> Complex64 {
    let (s, co) = (2.0 * PI * k as f64 / c as f64).sin_cos();
    Complex64::new(co, s)
}

fn residue(v: i64, c: u64) -> u64 {
    v.rem_euclid(c as i64) as u64
}

fn finish(m: i64, n: i64, c: u64, value: Complex64) -> Result<KloostermanValue> {
    let value = finite(value, "Kloosterman sum")?;
    if value.im.abs() > 1e-9 * c as f64 {
        return Err(Error::Validation(format!("S({m},{n};{c}) has imaginary residue {:e}", value.im)));
    }
    Ok(KloostermanValue { m, n, c, value })
}

/// `S(m, n; c)` from a sieved inverse table.
pub fn kloosterman(m: i64, n: i64, c: u64) -> Result<KloostermanValue> {
    let inv = unit_inverses(c)?;
    kloosterman_with(m, n, c, &inv)
}

pub fn kloosterman_with(m: i64, n: i64, c: u64, inv: &[u32]) -> Result<KloostermanValue> {
    let (mr, nr) = (residue(m, c), residue(n, c));
    let table: Option<Vec<Complex64>> = (c <= PHASE_TABLE_MAX).then(|| (0..c).map(|k| phase(k, c)).collect());
    let terms: Vec<Complex64> = (0..c as usize)
        .filter(|&x| check_units(inv, x))
        .map(|x| {
            let k = (mr * x as u64 + nr * inv[x] as u64) % c;
            table.as_ref().map_or_else(|| phase(k, c), |t| t[k as usize])
        })
        .collect();
    finish(m, n, c, pairwise_sum(&terms))
}

/// `S(m, n; c)` with an extended-gcd inverse per term.
pub fn kloosterman_direct(m: i64, n: i64, c: u64) -> Result<KloostermanValue> {
    if c == 0 || c > MAX_MODULUS {
        return Err(Error::Precondition(format!("modulus must lie in [1, 1e7], got {c}")));
    }
    let (mr, nr) = (residue(m, c), residue(n, c));
    let mut total = Complex64::default();
    for x in 0..c {
        if let Some(xi) = mod_inverse(x, c) {
            let k = ((mr as u128 * x as u128 + nr as u128 * xi as u128) % c as u128) as u64;
            total += phase(k, c);
        }
    }
    finish(m, n, c, total)
}

/// Weil's bound `d(c) gcd(m, n, c)^{1/2} c^{1/2}`.
pub fn weil_bound(m: i64, n: i64, c: u64) -> Result<f64> {
    let g = crate::arith::gcd(crate::arith::gcd(m.unsigned_abs(), n.unsigned_abs()), c);
    Ok(factorize(c)?.num_divisors() as f64 * (g as f64).sqrt() * (c as f64).sqrt())
}

/// `S(n, n; c)` for every `n` in `ns`, from one histogram of `x + 1/x mod c`.
pub fn kloosterman_diagonal_batch(c: u64, ns: &[i64]) -> Result<Vec<f64>> {
    let inv = unit_inverses(c)?;
    let mut counts = vec![0u32; c as usize];
    for x in 0..c as usize {
        if check_units(&inv, x) {
            counts[(x as u64 + inv[x] as u64) as usize % c as usize] += 1;
        }
    }
    let cos: Vec<f64> = (0..c).map(|k| (2.0 * PI * k as f64 / c as f64).cos()).collect();
    Ok(ns
        .iter()
        .map(|&n| {
            let step = residue(n, c) as usize;
            let cu = c as usize;
            let mut idx = 0usize;
            let mut terms = Vec::with_capacity(cu);
            for &cnt in &counts {
                if cnt != 0 {
                    terms.push(cnt as f64 * cos[idx]);
                }
                idx += step;
                if idx >= cu {
                    idx -= cu;
                }
            }
            pairwise_sum(&terms)
        })
        .collect())
}

fn check_linnik(n: i64, c_max: f64, d: i64) -> Result<u64> {
    if n < 1 || d < 1 {
        return Err(Error::Domain(format!("linnik sum needs n, D >= 1, got n = {n}, D = {d}")));
    }
    if !(c_max <= MAX_LINNIK_C) {
        return Err(Error::Precondition(format!("linnik sum limited to C <= 1e5, got {c_max}")));
    }
    Ok(if c_max < 1.0 { 0 } else { c_max.floor() as u64 })
}

fn linnik_term(n: i64, d: i64, c: u64) -> Result<Complex64> {
    let s = kloosterman(n, n, c)?.value;
    Ok(phase(residue(d, c), c) * s / c as f64)
}

/// `sum_{c <= C} e(D/c) S(n, n; c) / c`.
pub fn linnik_sum(n: i64, c_max: f64, d: i64) -> Result<ComplexValue> {
    let cm = check_linnik(n, c_max, d)?;
    let terms: Vec<Complex64> = (1..=cm).into_par_iter().map(|c| linnik_term(n, d, c)).collect::<Result<_>>()?;
    Ok(pairwise_sum(&terms))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinnikRow {
    pub c_max: f64,
    pub d: i64,
    pub n: i64,
    pub value: ComplexValue,
}

pub const LINNIK_CSV_HEADER: &str = "C,D,n,re,im,abs";
pub const KLOOSTERMAN_CSV_HEADER: &str = "c,S";

pub fn write_linnik_csv<W: Write>(mut w: W, rows: &[LinnikRow]) -> std::io::Result<()> {
    writeln!(w, "{LINNIK_CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{:e},{:e},{:e}", r.c_max, r.d, r.n, r.value.re, r.value.im, r.value.norm())?;
    }
    Ok(())
}

pub fn write_kloosterman_csv<W: Write>(mut w: W, rows: &[KloostermanValue]) -> std::io::Result<()> {
    writeln!(w, "{KLOOSTERMAN_CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{:e}", r.c, r.value.re)?;
    }
    Ok(())
}

/// The weight `h` on `[N, 2N]`: a rescaled `phi` bump with integral `N`.
pub fn weight_h(x: f64, big_n: f64) -> f64 {
    big_n * phi_delta(x - 1.5 * big_n, 0.5 * big_n)
}

/// Kloosterman data for `(1/N) sum_n h(n) sum_q S(n,n;q)/q phi(4 pi n/q)`,
/// evaluable directly or by summation by parts in `q`.
#[derive(Debug, Clone)]
pub struct WeightedKloosterman {
    pub big_n: f64,
    pub params: TestFunctionParams,
    pub q_max: u64,
    ns: Vec<i64>,
    /// `s[q - 1][j] = S(n_j, n_j; q)`.
    s: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSum {
    pub value: ComplexValue,
    /// Smallest `q` kept for `n = N` after damping.
    pub q_min: u64,
    pub q_max: u64,
    /// Size of the `q_max/2 < q <= q_max` contribution, a proxy for the
    /// truncation error.
    pub tail_estimate: f64,
}

fn kappa(n: i64, a: f64) -> f64 {
    4.0 * PI * n as f64 * a
}

/// First `q` whose damping factor reaches [`DAMPING_CUTOFF`].
fn first_q(kappa: f64) -> u64 {
    (kappa / -DAMPING_CUTOFF.ln()).floor() as u64 + 1
}

impl WeightedKloosterman {
    pub fn new(big_n: f64, x: f64, t: f64, q_max: u64) -> Result<Self> {
        if !(1.0..=MAX_WEIGHTED_N).contains(&big_n) {
            return Err(Error::Precondition(format!("weighted sum needs 1 <= N <= 1e3, got {big_n}")));
        }
        if q_max == 0 || q_max > 200_000 {
            return Err(Error::Precondition(format!("q truncation must lie in [1, 2e5], got {q_max}")));
        }
        let params = test_function_params(x, t)?;
        let ns: Vec<i64> = ((big_n.floor() as i64 + 1)..(2.0 * big_n).ceil() as i64).collect();
        let q_lo = first_q(kappa(ns.first().copied().unwrap_or(1), params.a));
        let s = (1..=q_max)
            .into_par_iter()
            .map(|q| if q < q_lo { Ok(Vec::new()) } else { kloosterman_diagonal_batch(q, &ns) })
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightedKloosterman { big_n, params, q_max, ns, s })
    }

    fn weighted_total(&self, per_n: Vec<Complex64>) -> Complex64 {
        let weighted: Vec<Complex64> =
            self.ns.iter().zip(per_n).map(|(&n, v)| v * weight_h(n as f64, self.big_n)).collect();
        pairwise_sum(&weighted) / self.big_n
    }

    fn direct_range(&self, q_floor: u64) -> Vec<Complex64> {
        self.ns
            .par_iter()
            .enumerate()
            .map(|(j, &n)| {
                let q0 = first_q(kappa(n, self.params.a)).max(q_floor);
                let terms: Vec<Complex64> = (q0..=self.q_max)
                    .map(|q| {
                        let s = self.s[q as usize - 1][j];
                        phi_test(4.0 * PI * n as f64 / q as f64, &self.params) * (s / q as f64)
                    })
                    .collect();
                pairwise_sum(&terms)
            })
            .collect()
    }

    fn finish(&self, per_n: Vec<Complex64>) -> Result<WeightedSum> {
        let value = finite(self.weighted_total(per_n), "weighted Kloosterman sum")?;
        let tail_estimate = self.weighted_total(self.direct_range(self.q_max / 2 + 1)).norm();
        let q_min = first_q(kappa(self.ns.first().copied().unwrap_or(1), self.params.a));
        Ok(WeightedSum { value, q_min, q_max: self.q_max, tail_estimate })
    }

    /// Term by term: `sum_q S(n,n;q)/q phi(4 pi n / q)`.
    pub fn direct(&self) -> Result<WeightedSum> {
        self.finish(self.direct_range(1))
    }

    /// Summation by parts against `f(y) = y^{-2} exp(-4 pi n a / y)`:
    /// `A(Q) f(Q) - sum_q A(q) int_q^{q+1} f'(y) dy`, with
    /// `A(q) = sum_{j <= q} S(n,n;j)/j * K exp(4 pi i n b / j)`.
    pub fn by_parts(&self) -> Result<WeightedSum> {
        let gl = GaussLegendre::cached(16);
        let sh = self.params.beta.sinh();
        let k0 = sh * sh / (2.0 * PI);
        let (a, b) = (self.params.a, self.params.b);
        let per_n: Vec<Complex64> = self
            .ns
            .par_iter()
            .enumerate()
            .map(|(j, &n)| {
                let kap = kappa(n, a);
                let q0 = first_q(kap);
                if q0 > self.q_max {
                    return Complex64::default();
                }
                let k = k0 * (4.0 * PI * n as f64).powi(2);
                let f = |y: f64| (-kap / y).exp() / (y * y);
                let df = |y: f64| (-kap / y).exp() * (kap / y.powi(4) - 2.0 / y.powi(3));
                let mut acc = Complex64::default();
                let mut parts = Vec::with_capacity((self.q_max - q0) as usize + 1);
                for q in q0..=self.q_max {
                    let s = self.s[q as usize - 1][j];
                    acc += Complex64::from_polar(s / q as f64, 4.0 * PI * n as f64 * b / q as f64);
                    if q < self.q_max {
                        let qf = q as f64;
                        parts.push(acc * -gl.integrate(df, qf, qf + 1.0));
                    } else {
                        parts.push(acc * f(q as f64));
                    }
                }
                k * pairwise_sum(&parts)
            })
            .collect();
        self.finish(per_n)
    }
}

/// Direct evaluation of the weighted double sum, truncated at `q <= q_max`.
pub fn weighted_kloosterman_sum(big_n: f64, x: f64, t: f64, q_max: u64) -> Result<WeightedSum> {
    WeightedKloosterman::new(big_n, x, t, q_max)?.direct()
}
