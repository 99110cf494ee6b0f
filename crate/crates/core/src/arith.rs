//! Exact 64-bit integer arithmetic: factorization, multiplicative functions,
//! the Kronecker symbol and the `D = D0 * f^2` splitting of discriminants.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A positive integer together with its canonical prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    pub value: u64,
    /// `(prime, exponent)` pairs, primes strictly increasing.
    pub factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger { value: 1, factors: Vec::new() }
    }

    /// Builds from an unsorted list of prime factors (with repetition).
    fn from_primes(value: u64, mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        let mut factors: Vec<(u64, u32)> = Vec::new();
        for p in primes {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
        FactoredInteger { value, factors }
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn num_divisors(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn mobius(&self) -> i32 {
        if !self.is_squarefree() {
            return 0;
        }
        if self.factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Product of two factorizations (exponents add). Errors on overflow.
    pub fn mul(&self, other: &FactoredInteger) -> Result<FactoredInteger> {
        let value = self
            .value
            .checked_mul(other.value)
            .ok_or(Error::Overflow("factored product"))?;
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            match (self.factors.get(i), other.factors.get(j)) {
                (Some(&(p, a)), Some(&(q, b))) if p == q => {
                    factors.push((p, a + b));
                    i += 1;
                    j += 1;
                }
                (Some(&(p, a)), Some(&(q, _))) if p < q => {
                    factors.push((p, a));
                    i += 1;
                }
                (Some(_), Some(&(q, b))) => {
                    factors.push((q, b));
                    j += 1;
                }
                (Some(&f), None) => {
                    factors.push(f);
                    i += 1;
                }
                (None, Some(&f)) => {
                    factors.push(f);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Ok(FactoredInteger { value, factors })
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd(a.unsigned_abs(), b.unsigned_abs()) as i64
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

pub fn is_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho. `n` must be odd and composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut q) = (2u64, 2u64, 1u64, 1u64);
        let mut ys = 2u64;
        let mut r = 1u64;
        const M: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += M;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_into(d, out);
    split_into(n / d, out);
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Canonical factorization: trial division below 10^6, then Pollard rho with
/// Miller-Rabin certification for the cofactor.
pub fn factorize(n: u64) -> Result<FactoredInteger> {
    if n == 0 || n > 1u64 << 63 {
        return Err(Error::Domain(format!("factorize: {n} outside [1, 2^63]")));
    }
    let mut primes = Vec::new();
    let mut m = n;
    while m.is_multiple_of(2) {
        primes.push(2);
        m /= 2;
    }
    let mut p = 3u64;
    while p < TRIAL_LIMIT && p * p <= m {
        while m.is_multiple_of(p) {
            primes.push(p);
            m /= p;
        }
        p += 2;
    }
    if m > 1 {
        if p * p > m {
            primes.push(m);
        } else {
            split_into(m, &mut primes);
        }
    }
    Ok(FactoredInteger::from_primes(n, primes))
}

/// Smallest-prime-factor table for fast factorization of many small integers.
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: usize) -> Self {
        let limit = limit.max(2);
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfSieve { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    #[inline]
    pub fn spf(&self, n: usize) -> u32 {
        self.spf[n]
    }

    #[inline]
    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] as usize == n
    }

    pub fn factorize(&self, n: u64) -> FactoredInteger {
        assert!(n >= 1 && n as usize <= self.limit(), "SpfSieve::factorize out of range");
        let mut factors: Vec<(u64, u32)> = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p as u64, e));
        }
        FactoredInteger { value: n, factors }
    }

    /// Factorization using the sieve when in range, Pollard rho otherwise.
    pub fn factorize_any(&self, n: u64) -> Result<FactoredInteger> {
        if n >= 1 && n as usize <= self.limit() {
            Ok(self.factorize(n))
        } else {
            factorize(n)
        }
    }
}

/// Jacobi symbol `(a | n)` for odd positive `n`.
pub fn jacobi(mut a: u64, mut n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut sign = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// 32-bit Jacobi symbol for odd `n`, the hot path of character tables.
/// Binary variant: no divisions after the initial reduction.
#[inline]
pub fn jacobi_u32(a: u32, n: u32) -> i32 {
    debug_assert!(n & 1 == 1);
    let mut a = a % n;
    let mut n = n;
    let mut t = 0u32;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z & 1 == 1 {
            t ^= (n ^ (n >> 1)) & 2;
        }
        if a < n {
            t ^= a & n & 2;
            std::mem::swap(&mut a, &mut n);
        }
        a -= n;
    }
    if n == 1 {
        1 - t as i32
    } else {
        0
    }
}

/// Kronecker symbol `(d | 2)`.
#[inline]
pub fn kronecker_two(d: i64) -> i32 {
    match d.rem_euclid(8) {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// Kronecker symbol `(d | m)` for positive `m`.
pub fn kronecker(d: i64, m: u64) -> i32 {
    assert!(m > 0, "kronecker: m must be positive");
    let tz = m.trailing_zeros();
    let odd = m >> tz;
    let mut val = 1;
    if tz > 0 {
        let k2 = kronecker_two(d);
        if k2 == 0 {
            return 0;
        }
        if tz % 2 == 1 {
            val = k2;
        }
    }
    if odd == 1 {
        return val;
    }
    let a = d.rem_euclid(odd as i64) as u64;
    val * jacobi(a, odd)
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    let squarefree = |m: u64| factorize(m).map(|f| f.is_squarefree()).unwrap_or(false);
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// The splitting `D = D0 * f^2` of a positive nonsquare discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscriminantDecomposition {
    pub d: u64,
    pub d0: u64,
    pub f: u64,
}

pub fn decompose_discriminant(d: u64) -> Result<DiscriminantDecomposition> {
    decompose_factored(&validate_disc(d)?)
}

pub(crate) fn validate_disc(d: u64) -> Result<FactoredInteger> {
    if d % 4 == 2 || d % 4 == 3 {
        return Err(Error::InvalidDiscriminant(d, "not 0 or 1 mod 4"));
    }
    if is_square(d) {
        return Err(Error::InvalidDiscriminant(d, "perfect square"));
    }
    factorize(d)
}

/// Same as [`decompose_discriminant`] when the factorization is already known.
pub fn decompose_factored(fd: &FactoredInteger) -> Result<DiscriminantDecomposition> {
    let d = fd.value;
    if d % 4 == 2 || d % 4 == 3 {
        return Err(Error::InvalidDiscriminant(d, "not 0 or 1 mod 4"));
    }
    let mut kernel = 1u64;
    let mut root = 1u64;
    for &(p, e) in &fd.factors {
        if e % 2 == 1 {
            kernel *= p;
        }
        root *= p.pow(e / 2);
    }
    if kernel == 1 {
        return Err(Error::InvalidDiscriminant(d, "perfect square"));
    }
    let (d0, f) = if kernel % 4 == 1 {
        (kernel, root)
    } else {
        debug_assert!(root.is_multiple_of(2));
        (4 * kernel, root / 2)
    };
    Ok(DiscriminantDecomposition { d, d0, f })
}

pub fn mobius(n: u64) -> Result<i32> {
    Ok(factorize(n)?.mobius())
}

pub fn divisors(n: u64) -> Result<Vec<u64>> {
    Ok(factorize(n)?.divisors())
}

/// `sigma_z(n) = sum_{d | n} d^z` for complex `z`.
pub fn sigma_z(n: u64, z: Complex64) -> Result<Complex64> {
    Ok(sigma_z_factored(&factorize(n)?, z))
}

pub fn sigma_z_factored(fi: &FactoredInteger, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for &(p, e) in &fi.factors {
        let pz = (z * (p as f64).ln()).exp();
        let mut term = Complex64::new(1.0, 0.0);
        let mut local = Complex64::new(1.0, 0.0);
        for _ in 0..e {
            term *= pz;
            local += term;
        }
        acc *= local;
    }
    acc
}
