//! Batch evaluation of central values `L(1/2, chi_D)` for positive
//! fundamental discriminants, used by the long partial-sum scans.
//!
//! With W(x) = Gamma(1/4, x) / Gamma(1/4) the functional equation gives
//! L(1/2) = 2 sum_m chi(m) m^{-1/2} W(pi m^2 / D). Writing
//! W(x) = 1 - x^{1/4} g(x) with g entire, each term becomes
//! chi(m) (m^{-1/2} - (pi/D)^{1/4} g(x_m)), and g is tabulated once as
//! piecewise polynomials.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::complex_gamma;
use super::incgamma::upper_incomplete_gamma;
use crate::arith::{jacobi_u32, kronecker_two};
use crate::error::{Error, Result};

/// Truncation point in `x = pi m^2 / D`; W(18) is about 5e-10.
pub const X_MAX: f64 = 18.0;
const CELLS: usize = 36;
const DEGREE: usize = 12;
const LANES: usize = 8;

struct PiecewisePoly {
    width: f64,
    /// Monomial coefficients in u = (x - center) / (width / 2), per cell.
    coeffs: Vec<[f64; DEGREE + 1]>,
}

impl PiecewisePoly {
    fn fit<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cells: usize) -> Self {
        let width = (hi - lo) / cells as f64;
        let n = DEGREE + 1;
        let nodes: Vec<f64> = (0..n).map(|k| (PI * (k as f64 + 0.5) / n as f64).cos()).collect();
        let mut coeffs = Vec::with_capacity(cells);
        for cell in 0..cells {
            let center = lo + width * (cell as f64 + 0.5);
            let values: Vec<f64> = nodes.iter().map(|u| f(center + 0.5 * width * u)).collect();
            // Chebyshev coefficients, then conversion to the monomial basis.
            let mut cheb = vec![0.0; n];
            for (j, cj) in cheb.iter_mut().enumerate() {
                let s: f64 = (0..n).map(|k| values[k] * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos()).sum();
                *cj = 2.0 * s / n as f64;
            }
            cheb[0] *= 0.5;
            let mut mono = [0.0; DEGREE + 1];
            let (mut t_prev, mut t_cur) = (vec![0.0; n], vec![0.0; n]);
            t_prev[0] = 1.0;
            t_cur[1] = 1.0;
            for (k, c) in mono.iter_mut().enumerate() {
                *c += cheb[0] * t_prev[k] + cheb[1] * t_cur[k];
            }
            for cj in cheb.iter().skip(2) {
                let mut t_next = vec![0.0; n];
                for k in 0..n {
                    t_next[k] = -t_prev[k] + if k > 0 { 2.0 * t_cur[k - 1] } else { 0.0 };
                }
                for k in 0..n {
                    mono[k] += cj * t_next[k];
                }
                t_prev = t_cur;
                t_cur = t_next;
            }
            coeffs.push(mono);
        }
        PiecewisePoly { width, coeffs }
    }

    #[cfg(test)]
    fn eval(&self, x: f64) -> f64 {
        let cell = ((x / self.width) as usize).min(self.coeffs.len() - 1);
        let center = self.width * (cell as f64 + 0.5);
        horner(&self.coeffs[cell], (x - center) * 2.0 / self.width)
    }
}

#[inline(always)]
fn horner(c: &[f64; DEGREE + 1], u: f64) -> f64 {
    let mut acc = c[DEGREE];
    for k in (0..DEGREE).rev() {
        acc = acc * u + c[k];
    }
    acc
}

#[inline(always)]
fn horner_fused(c: &[f64; DEGREE + 1], u: f64) -> f64 {
    let mut acc = c[DEGREE];
    for k in (0..DEGREE).rev() {
        acc = acc.mul_add(u, c[k]);
    }
    acc
}

/// Arguments of one cell of the weighted character sum.
struct CellSum<'a> {
    chi: &'a [i8],
    inv_sqrt: &'a [f64],
    coeffs: &'a [f64; DEGREE + 1],
    alpha: f64,
    beta: f64,
    center: f64,
    scale: f64,
}

/// `sum_{m in lo..hi} chi(m) (m^{-1/2} - beta g(alpha m^2))` with
/// independent lanes so the polynomial vectorizes.
#[inline(always)]
fn cell_sum<const FUSED: bool>(cs: &CellSum, lo: usize, hi: usize) -> f64 {
    let chi = &cs.chi[lo..hi];
    let inv = &cs.inv_sqrt[lo..hi];
    let term = |mf: f64, c: i8, w: f64| {
        let u = (cs.alpha * mf * mf - cs.center) * cs.scale;
        let g = if FUSED { horner_fused(cs.coeffs, u) } else { horner(cs.coeffs, u) };
        c as f64 * (w - cs.beta * g)
    };
    let mut lanes = [0.0f64; LANES];
    let mut base = lo as f64;
    let chunks = chi.chunks_exact(LANES).zip(inv.chunks_exact(LANES));
    for (cc, ww) in chunks {
        for l in 0..LANES {
            lanes[l] += term(base + l as f64, cc[l], ww[l]);
        }
        base += LANES as f64;
    }
    let mut part: f64 = lanes.iter().sum();
    let done = chi.len() / LANES * LANES;
    for (j, (&c, &w)) in chi[done..].iter().zip(&inv[done..]).enumerate() {
        part += term((lo + done + j) as f64, c, w);
    }
    part
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f,avx2,fma")]
unsafe fn cell_sum_avx512(cs: &CellSum, lo: usize, hi: usize) -> f64 {
    cell_sum::<true>(cs, lo, hi)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn cell_sum_avx2(cs: &CellSum, lo: usize, hi: usize) -> f64 {
    cell_sum::<true>(cs, lo, hi)
}

fn cell_sum_dispatch(cs: &CellSum, lo: usize, hi: usize) -> f64 {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx512f") {
            // SAFETY: the required CPU features were detected at runtime.
            return unsafe { cell_sum_avx512(cs, lo, hi) };
        }
        if std::arch::is_x86_feature_detected!("avx2") && std::arch::is_x86_feature_detected!("fma") {
            // SAFETY: as above.
            return unsafe { cell_sum_avx2(cs, lo, hi) };
        }
    }
    cell_sum::<false>(cs, lo, hi)
}

/// `g(x) = (1 - W(x)) / x^{1/4}`.
fn g_exact(x: f64) -> f64 {
    let a = Complex64::new(0.25, 0.0);
    if x < 1e-3 {
        // gamma(1/4, x) x^{-1/4} = sum (-x)^k / (k! (k + 1/4))
        let mut term = 1.0;
        let mut sum = 4.0;
        for k in 1..12 {
            term *= -x / k as f64;
            sum += term / (k as f64 + 0.25);
        }
        return sum / complex_gamma(a).expect("gamma(1/4)").re;
    }
    let upper = upper_incomplete_gamma(a, Complex64::new(x, 0.0)).expect("incomplete gamma").re;
    let full = complex_gamma(a).expect("gamma(1/4)").re;
    (1.0 - upper / full) / x.powf(0.25)
}

/// Legendre symbols `(d | p)` for odd primes `p`, scalar path.
fn legendre_scalar(d: u64, primes: &[f64], out: &mut [i8]) {
    for (o, &p) in out.iter_mut().zip(primes) {
        let p = p as u32;
        *o = jacobi_u32((d % p as u64) as u32, p) as i8;
    }
}

/// Euler's criterion on eight primes per vector. Operands stay below 2^22,
/// so products are exact in f64 and `x - floor(x / p) p` reduces exactly
/// after one correction step.
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn legendre_avx512(d: u64, primes: &[f64], pinv: &[f64], half_orders: &[u64], out: &mut [i8]) {
    use std::arch::x86_64::*;

    #[inline(always)]
    unsafe fn reduce(x: __m512d, p: __m512d, pinv: __m512d) -> __m512d {
        let q = _mm512_roundscale_pd::<{ _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC }>(_mm512_mul_pd(x, pinv));
        let r = _mm512_fnmadd_pd(q, p, x);
        let neg = _mm512_cmp_pd_mask::<_CMP_LT_OQ>(r, _mm512_setzero_pd());
        let r = _mm512_mask_add_pd(r, neg, r, p);
        let big = _mm512_cmp_pd_mask::<_CMP_GE_OQ>(r, p);
        _mm512_mask_sub_pd(r, big, r, p)
    }

    // Four independent vectors per pass hide the latency of the chain.
    const V: usize = 4;
    const CHUNK: usize = 8 * V;
    let n = primes.len();
    let dv = _mm512_set1_pd(d as f64);
    let mut i = 0;
    while i < n {
        let width = CHUNK.min(n - i);
        let mut pp = [3.0f64; CHUNK];
        let mut pi = [1.0 / 3.0; CHUNK];
        let mut ee = [1u64; CHUNK];
        pp[..width].copy_from_slice(&primes[i..i + width]);
        pi[..width].copy_from_slice(&pinv[i..i + width]);
        ee[..width].copy_from_slice(&half_orders[i..i + width]);
        let mut p = [_mm512_setzero_pd(); V];
        let mut pinv_v = [_mm512_setzero_pd(); V];
        let mut e = [_mm512_setzero_si512(); V];
        let mut base = [_mm512_setzero_pd(); V];
        let mut acc = [_mm512_set1_pd(1.0); V];
        for v in 0..V {
            p[v] = _mm512_loadu_pd(pp.as_ptr().add(8 * v));
            pinv_v[v] = _mm512_loadu_pd(pi.as_ptr().add(8 * v));
            e[v] = _mm512_loadu_si512(ee.as_ptr().add(8 * v) as *const _);
            base[v] = reduce(dv, p[v], pinv_v[v]);
        }
        for bit in (0..22).rev() {
            let probe = _mm512_set1_epi64(1i64 << bit);
            for v in 0..V {
                let sq = reduce(_mm512_mul_pd(acc[v], acc[v]), p[v], pinv_v[v]);
                let mu = reduce(_mm512_mul_pd(sq, base[v]), p[v], pinv_v[v]);
                acc[v] = _mm512_mask_blend_pd(_mm512_test_epi64_mask(e[v], probe), sq, mu);
            }
        }
        let mut res = [0.0f64; CHUNK];
        for (v, a) in acc.iter().enumerate() {
            _mm512_storeu_pd(res.as_mut_ptr().add(8 * v), *a);
        }
        for l in 0..width {
            out[i + l] = if res[l] == 1.0 {
                1
            } else if res[l] == 0.0 {
                0
            } else {
                -1
            };
        }
        i += CHUNK;
    }
}

fn legendre_dispatch(d: u64, primes: &[f64], pinv: &[f64], half_orders: &[u64], out: &mut [i8]) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx512f") {
            // SAFETY: the required CPU feature was detected at runtime.
            return unsafe { legendre_avx512(d, primes, pinv, half_orders, out) };
        }
    }
    legendre_scalar(d, primes, out)
}

/// Shared tables for [`CentralValueKernel::eval`]; build once per scan.
pub struct CentralValueKernel {
    max_terms: usize,
    inv_sqrt: Vec<f64>,
    spf: Vec<u32>,
    cofactor: Vec<u32>,
    /// Odd primes up to `max_terms`, their reciprocals and `(p - 1) / 2`.
    odd_primes: Vec<f64>,
    odd_prime_inv: Vec<f64>,
    half_orders: Vec<u64>,
    g: PiecewisePoly,
}

impl CentralValueKernel {
    /// Largest supported discriminant: keeps every prime below 2^22 so the
    /// modular arithmetic stays exact in f64.
    pub const MAX_DISC: u64 = 3_000_000_000_000;

    /// Tables sufficient for every discriminant up to `max_disc`.
    pub fn new(max_disc: u64) -> Result<Self> {
        if max_disc > Self::MAX_DISC {
            return Err(Error::Domain(format!("central value kernel: {max_disc} above {}", Self::MAX_DISC)));
        }
        let max_terms = Self::terms_for(max_disc).max(2);
        let mut spf = vec![0u32; max_terms + 1];
        for i in 2..=max_terms {
            if spf[i] == 0 {
                let mut j = i;
                while j <= max_terms {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let cofactor = (0..=max_terms)
            .map(|m| if m < 2 { 1 } else { (m / spf[m] as usize) as u32 })
            .collect();
        let inv_sqrt = (0..=max_terms).map(|m| if m == 0 { 0.0 } else { 1.0 / (m as f64).sqrt() }).collect();
        let odd: Vec<usize> = (3..=max_terms).filter(|&m| spf[m] as usize == m).collect();
        Ok(CentralValueKernel {
            max_terms,
            inv_sqrt,
            spf,
            cofactor,
            odd_primes: odd.iter().map(|&p| p as f64).collect(),
            odd_prime_inv: odd.iter().map(|&p| 1.0 / p as f64).collect(),
            half_orders: odd.iter().map(|&p| (p as u64 - 1) / 2).collect(),
            g: PiecewisePoly::fit(g_exact, 0.0, X_MAX, CELLS),
        })
    }

    fn terms_for(d: u64) -> usize {
        (X_MAX * d as f64 / PI).sqrt().floor() as usize
    }

    /// `L(1/2, chi_d0)` for a positive fundamental discriminant `d0`. The
    /// caller guarantees fundamentality; `chi` is scratch space.
    pub fn eval(&self, d0: u64, chi: &mut Vec<i8>) -> Result<f64> {
        let m_max = Self::terms_for(d0);
        if m_max > self.max_terms {
            return Err(Error::Domain(format!("central value kernel built for smaller discriminants than {d0}")));
        }
        let n_odd = self.odd_primes.partition_point(|&p| p <= m_max as f64);
        let mut prime_chi = vec![0i8; n_odd];
        legendre_dispatch(
            d0,
            &self.odd_primes[..n_odd],
            &self.odd_prime_inv[..n_odd],
            &self.half_orders[..n_odd],
            &mut prime_chi,
        );
        chi.clear();
        chi.resize(m_max + 1, 0);
        if m_max >= 1 {
            chi[1] = 1;
        }
        if m_max >= 2 {
            chi[2] = kronecker_two(d0 as i64) as i8;
        }
        for (j, &c) in prime_chi.iter().enumerate() {
            chi[self.odd_primes[j] as usize] = c;
        }
        // Primes have cofactor 1, so the product leaves their entries intact.
        let spf = &self.spf[..=m_max];
        let cof = &self.cofactor[..=m_max];
        for m in 4..=m_max {
            let (a, b) = (spf[m] as usize, cof[m] as usize);
            assert!(a <= m && b <= m);
            chi[m] = chi[a] * chi[b];
        }
        let alpha = PI / d0 as f64;
        let beta = alpha.sqrt().sqrt();
        let scale = 2.0 / self.g.width;
        let mut acc = 0.0;
        let mut m_lo = 1usize;
        for (cell, c) in self.g.coeffs.iter().enumerate() {
            let x_hi = self.g.width * (cell + 1) as f64;
            let m_hi = (((x_hi / alpha).sqrt().floor() as usize) + 1).min(m_max + 1);
            let center = self.g.width * (cell as f64 + 0.5);
            let cs = CellSum { chi, inv_sqrt: &self.inv_sqrt, coeffs: c, alpha, beta, center, scale };
            let part = cell_sum_dispatch(&cs, m_lo, m_hi);
            acc += part;
            m_lo = m_hi;
            if m_lo > m_max {
                break;
            }
        }
        Ok(2.0 * acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_fundamental_discriminant;
    use crate::specfun::{dirichlet_l_route, LRoute};

    #[test]
    fn tabulated_g_matches_direct_evaluation() {
        let g = PiecewisePoly::fit(g_exact, 0.0, X_MAX, CELLS);
        for k in 0..=1000 {
            let x = X_MAX * k as f64 / 1000.0;
            assert!((g.eval(x) - g_exact(x)).abs() < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn kernel_matches_functional_equation_route() {
        let kernel = CentralValueKernel::new(5_000_000).unwrap();
        let mut scratch = Vec::new();
        let mut checked = 0;
        for d in (5u64..5_000_000).step_by(99_991) {
            if !is_fundamental_discriminant(d as i64) {
                continue;
            }
            let fast = kernel.eval(d, &mut scratch).unwrap();
            let slow = dirichlet_l_route(Complex64::new(0.5, 0.0), d as i64, LRoute::FunctionalEquation).unwrap().re;
            assert!((fast - slow).abs() < 1e-8, "D = {d}: {fast} vs {slow}");
            checked += 1;
        }
        assert!(checked > 10);
        for d in [5u64, 8, 12, 13, 21] {
            let fast = kernel.eval(d, &mut scratch).unwrap();
            let slow = dirichlet_l_route(Complex64::new(0.5, 0.0), d as i64, LRoute::Hurwitz).unwrap().re;
            assert!((fast - slow).abs() < 1e-8, "D = {d}");
        }
    }

    #[test]
    fn rejects_discriminants_beyond_tables() {
        let kernel = CentralValueKernel::new(1000).unwrap();
        assert!(kernel.eval(1_000_001, &mut Vec::new()).is_err());
    }
}
