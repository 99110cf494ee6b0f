//! Prime geodesics on the modular surface: `Psi(X) = sum_{N(P) <= X} Lambda(P)`
//! computed from reduced indefinite forms and Pell units, and through Zagier
//! L-values at `s = 1`.
//!
//! Hyperbolic classes of trace `n` correspond to classes of (possibly
//! imprimitive) forms of discriminant `n^2 - 4`. A class with content `g` is
//! `g` times a primitive class of discriminant `(n^2 - 4)/g^2`, and its
//! primitive geodesic has norm `eps^2` with `eps` the fundamental unit of
//! that smaller discriminant.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{factorize, gcd, is_square, isqrt, validate_disc};
use crate::error::{Error, Result};
use crate::sum::pairwise_sum;
use crate::zagier::{trace_discriminant, zagier_l};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormClassData {
    pub d: u64,
    /// Narrow class number: cycles of reduced primitive forms.
    pub class_count: u64,
    /// Fundamental solution of `t^2 - D u^2 = 4`; `None` when it does not
    /// fit in 128 bits (the regulator is still exact to rounding).
    pub pell: Option<(u128, u128)>,
    pub regulator: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiMethod {
    Direct,
    ViaZagier,
}

/// Which traces enter the L-value side of the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceRange {
    /// Traces whose class norm is at most `X`: `n <= sqrt(X) + 1/sqrt(X)`.
    NormCutoff,
    /// The literal range `3 <= n <= X`.
    Literal,
}

#[derive(Debug, Clone, Copy)]
pub struct PsiResult {
    pub x: f64,
    pub value: f64,
    pub method: PsiMethod,
    /// Contributing classes (direct) or traces (via Zagier).
    pub terms: u64,
}

/// A reduced indefinite form `(a, b, c)` with `b^2 - 4ac = D`.
type Form = (i64, i64, i64);

fn is_reduced(f: Form, root: f64) -> bool {
    let (a, b, _) = f;
    let b = b as f64;
    let two_a = 2.0 * a.unsigned_abs() as f64;
    b > 0.0 && b < root && root - b < two_a && two_a < root + b
}

/// Right neighbour in the reduction cycle.
fn rho(f: Form, d: i64, root: f64) -> Form {
    let (_, b, c) = f;
    let m = 2 * c.abs();
    // b' = -b (mod 2|c|) with sqrt(D) - 2|c| < b' < sqrt(D).
    let hi = root.floor() as i64;
    let mut b2 = hi - (hi + b).rem_euclid(m);
    if (b2 as f64) <= root - m as f64 {
        b2 += m;
    }
    let c2 = (b2 * b2 - d) / (4 * c);
    (c, b2, c2)
}

fn reduced_forms(d: u64) -> Result<Vec<Form>> {
    validate_disc(d)?;
    let di = d as i64;
    let root = (d as f64).sqrt();
    let mut forms = Vec::new();
    let mut b = (d % 2) as i64;
    if b == 0 {
        b = 2;
    }
    while (b as f64) < root {
        let ac = (di - b * b) / 4;
        for a in factorize(ac as u64)?.divisors() {
            let a = a as i64;
            let c = ac / a;
            for (sa, sc) in [(a, -c), (-a, c)] {
                let f = (sa, b, sc);
                if gcd(gcd(a as u64, b as u64), c as u64) == 1 && is_reduced(f, root) {
                    forms.push(f);
                }
            }
        }
        b += 2;
    }
    Ok(forms)
}

/// Number of cycles of reduced primitive forms of discriminant `D`.
pub fn reduced_form_cycles(d: u64) -> Result<u64> {
    let forms = reduced_forms(d)?;
    let di = d as i64;
    let root = (d as f64).sqrt();
    let mut unseen: HashSet<Form> = forms.iter().copied().collect();
    let mut cycles = 0;
    for f in forms {
        if !unseen.remove(&f) {
            continue;
        }
        cycles += 1;
        let mut g = rho(f, di, root);
        while g != f {
            if !unseen.remove(&g) {
                return Err(Error::Validation(format!("reduction cycle of disc {d} left the reduced set at {g:?}")));
            }
            g = rho(g, di, root);
        }
    }
    Ok(cycles)
}

/// Fundamental unit data from the continued fraction of `(s + sqrt D)/2`,
/// `s = D mod 2`: `(Some((t, u)), log eps)`.
fn pell_and_regulator(d: u64) -> Result<(Option<(u128, u128)>, f64)> {
    validate_disc(d)?;
    let root_floor = isqrt(d) as i128;
    let root = (d as f64).sqrt();
    let di = d as i128;
    let (mut p, mut q) = ((d % 2) as i128, 2i128);
    // Convergent denominators q_{k-1}, q_{k-2}.
    let (mut q1, mut q2): (Option<u128>, Option<u128>) = (Some(1), Some(0));
    let mut log_eps = 0.0;
    let mut k = 0usize;
    loop {
        let a = (p + root_floor) / q;
        let p_next = a * q - p;
        let q_next = (di - p_next * p_next) / q;
        (p, q) = (p_next, q_next);
        k += 1;
        log_eps += ((p as f64 + root) / q as f64).ln();
        if q == 2 {
            break;
        }
        let a_next = ((p + root_floor) / q) as u128;
        let qn = q1.zip(q2).and_then(|(x, y)| a_next.checked_mul(x)?.checked_add(y));
        (q1, q2) = (qn, q1);
        if k > 100_000_000 {
            return Err(Error::Convergence(format!("continued fraction period of {d}")));
        }
    }
    // eta = q_{k-1} * alpha_k + q_{k-2} with alpha_k = (p + sqrt D)/2.
    let unit = q1.zip(q2).and_then(|(u, y)| {
        let t = u.checked_mul(p as u128)?.checked_add(y.checked_mul(2)?)?;
        Some((t, u))
    });
    let odd_period = k % 2 == 1;
    let (unit, log_eps) = if odd_period {
        let sq = unit.and_then(|(t, u)| {
            let t2 = t.checked_mul(t)?.checked_add(u.checked_mul(u)?.checked_mul(d as u128)?)? / 2;
            Some((t2, t.checked_mul(u)?))
        });
        (sq, 2.0 * log_eps)
    } else {
        (unit, log_eps)
    };
    if let Some((t, u)) = unit {
        if !solves_pell(d, t, u) {
            return Err(Error::Validation(format!("continued fraction unit of {d} fails t^2 - D u^2 = 4")));
        }
    }
    Ok((unit, log_eps))
}

/// `t^2 - D u^2 = 4` checked modulo 2^128.
fn solves_pell(d: u64, t: u128, u: u128) -> bool {
    t.wrapping_mul(t).wrapping_sub(u.wrapping_mul(u).wrapping_mul(d as u128)) == 4
}

/// Minimal `(t, u)` with `t, u > 0` and `t^2 - D u^2 = 4`.
pub fn fundamental_solution(d: u64) -> Result<(u128, u128)> {
    pell_and_regulator(d)?.0.ok_or(Error::Overflow("fundamental Pell solution"))
}

pub fn form_class_data(d: u64) -> Result<FormClassData> {
    let (pell, regulator) = pell_and_regulator(d)?;
    let regulator = match pell {
        // ln((t + u sqrt D)/2) = ln(t) + ln1p(sqrt(1 - 4/t^2)) - ln 2, stable for large t.
        Some((t, _)) => {
            let tf = t as f64;
            tf.ln() + (1.0 - 4.0 / (tf * tf)).sqrt().ln_1p() - std::f64::consts::LN_2
        }
        None => regulator,
    };
    Ok(FormClassData { d, class_count: reduced_form_cycles(d)?, pell, regulator })
}

/// Append-only CSV cache of [`FormClassData`] rows, validated on load.
pub struct ClassDataCache {
    path: Option<PathBuf>,
    rows: Mutex<HashMap<u64, FormClassData>>,
}

const CLASS_HEADER: &str = "D,class_count,pell_t,pell_u,regulator";

impl ClassDataCache {
    pub fn in_memory() -> Self {
        ClassDataCache { path: None, rows: Mutex::new(HashMap::new()) }
    }

    pub fn open(path: &Path) -> Result<Self> {
        let mut rows = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                let lineno = i + 1;
                if i == 0 {
                    if line.trim() != CLASS_HEADER {
                        return Err(Error::Parse { line: 1, msg: format!("expected header `{CLASS_HEADER}`") });
                    }
                    continue;
                }
                if line.trim().is_empty() {
                    continue;
                }
                let row = parse_class_row(&line).map_err(|msg| Error::Parse { line: lineno, msg })?;
                rows.insert(row.d, row);
            }
        } else {
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            let mut f = File::create(path)?;
            writeln!(f, "{CLASS_HEADER}")?;
        }
        Ok(ClassDataCache { path: Some(path.to_path_buf()), rows: Mutex::new(rows) })
    }

    pub fn len(&self) -> usize {
        self.rows.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rows for every discriminant in `ds`, computing (in parallel) and
    /// appending the missing ones.
    pub fn get_many(&self, ds: &[u64]) -> Result<Vec<FormClassData>> {
        let missing: Vec<u64> = {
            let rows = self.rows.lock().unwrap_or_else(|e| e.into_inner());
            let mut m: Vec<u64> = ds.iter().copied().filter(|d| !rows.contains_key(d)).collect();
            m.sort_unstable();
            m.dedup();
            m
        };
        let fresh: Vec<FormClassData> = missing.par_iter().map(|&d| form_class_data(d)).collect::<Result<_>>()?;
        let mut rows = self.rows.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(path) = &self.path {
            if !fresh.is_empty() {
                let mut f = OpenOptions::new().append(true).open(path)?;
                for r in &fresh {
                    writeln!(f, "{}", format_class_row(r))?;
                }
            }
        }
        for r in fresh {
            rows.insert(r.d, r);
        }
        Ok(ds.iter().map(|d| rows[d]).collect())
    }

    pub fn get(&self, d: u64) -> Result<FormClassData> {
        Ok(self.get_many(&[d])?[0])
    }
}

fn format_class_row(r: &FormClassData) -> String {
    match r.pell {
        Some((t, u)) => format!("{},{},{},{},{:.17e}", r.d, r.class_count, t, u, r.regulator),
        None => format!("{},{},,,{:.17e}", r.d, r.class_count, r.regulator),
    }
}

fn parse_class_row(line: &str) -> std::result::Result<FormClassData, String> {
    let cols: Vec<&str> = line.split(',').map(str::trim).collect();
    if cols.len() != 5 {
        return Err(format!("expected 5 columns, found {}", cols.len()));
    }
    let d: u64 = cols[0].parse().map_err(|e| format!("D: {e}"))?;
    validate_disc(d).map_err(|e| e.to_string())?;
    let class_count: u64 = cols[1].parse().map_err(|e| format!("class_count: {e}"))?;
    if class_count == 0 {
        return Err("class_count must be positive".into());
    }
    let regulator: f64 = cols[4].parse().map_err(|e| format!("regulator: {e}"))?;
    if !(regulator > 0.0) || !regulator.is_finite() {
        return Err("regulator must be positive".into());
    }
    let pell = match (cols[2], cols[3]) {
        ("", "") => None,
        (t, u) => {
            let t: u128 = t.parse().map_err(|e| format!("pell_t: {e}"))?;
            let u: u128 = u.parse().map_err(|e| format!("pell_u: {e}"))?;
            if u == 0 || !solves_pell(d, t, u) {
                return Err(format!("({t}, {u}) does not solve t^2 - {d} u^2 = 4"));
            }
            let expected = ((t as f64) + (u as f64) * (d as f64).sqrt()).ln() - std::f64::consts::LN_2;
            if (expected - regulator).abs() > 1e-9 * expected.max(1.0) {
                return Err("regulator inconsistent with the Pell solution".into());
            }
            Some((t, u))
        }
    };
    Ok(FormClassData { d, class_count, pell, regulator })
}

/// Largest trace whose class norm `((n + sqrt(n^2 - 4))/2)^2` is at most `X`.
pub fn max_trace_for_norm(x: f64) -> u64 {
    if x < 4.0 {
        return 2;
    }
    let mut n = (x.sqrt() + 1.0 / x.sqrt()).floor() as u64;
    while n >= 3 && class_norm(n) > x {
        n -= 1;
    }
    while class_norm(n + 1) <= x {
        n += 1;
    }
    n.max(2)
}

/// `((n + sqrt(n^2 - 4))/2)^2`.
pub fn class_norm(n: u64) -> f64 {
    let nf = n as f64;
    let e = (nf + (nf * nf - 4.0).sqrt()) / 2.0;
    e * e
}

/// Discriminants `(n^2 - 4)/g^2` of the primitive parts of trace-`n` classes.
fn primitive_levels(n: u64) -> Result<Vec<(u64, u64)>> {
    let fd = trace_discriminant(n)?;
    let mut root = 1u64;
    for &(p, e) in &fd.factors {
        root *= p.pow(e / 2);
    }
    let mut out = Vec::new();
    for g in factorize(root)?.divisors() {
        let d = fd.value / (g * g);
        if d % 4 == 0 || d % 4 == 1 {
            out.push((g, d));
        }
    }
    Ok(out)
}

fn check_range(x: f64) -> Result<()> {
    if !(x > 4.0 && x <= 1e8) {
        return Err(Error::Precondition(format!("Psi needs 4 < X <= 1e8, got {x}")));
    }
    Ok(())
}

/// `Psi(X)` from class numbers and fundamental units.
pub fn psi_direct(x: f64, cache: &ClassDataCache) -> Result<PsiResult> {
    check_range(x)?;
    let n_max = max_trace_for_norm(x);
    // Every discriminant whose unit has norm <= X is a primitive level of
    // some trace n <= n_max.
    let mut candidates: Vec<u64> = (3..=n_max)
        .into_par_iter()
        .map(|n| Ok(primitive_levels(n)?.into_iter().map(|(_, d)| d).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?
        .concat();
    candidates.sort_unstable();
    candidates.dedup();
    let rows = cache.get_many(&candidates)?;
    let mut terms = 0u64;
    let mut contributions = Vec::new();
    for row in rows {
        let Some((t0, _)) = row.pell else { continue };
        // Traces of eps^k: t_{k+1} = t0 t_k - t_{k-1}.
        let (mut prev, mut cur) = (2u128, t0);
        let mut k = 0u64;
        while cur <= n_max as u128 {
            k += 1;
            (prev, cur) = (cur, t0.saturating_mul(cur).saturating_sub(prev));
        }
        if k > 0 {
            terms += k * row.class_count;
            contributions.push(2.0 * row.regulator * (k * row.class_count) as f64);
        }
    }
    Ok(PsiResult { x, value: pairwise_sum(&contributions), method: PsiMethod::Direct, terms })
}

/// `2 sum_n sqrt(n^2 - 4) L_{n^2-4}(1)` over the traces selected by `range`.
pub fn psi_via_zagier(x: f64, range: TraceRange) -> Result<PsiResult> {
    check_range(x)?;
    let n_max = match range {
        TraceRange::NormCutoff => max_trace_for_norm(x),
        TraceRange::Literal => x.floor() as u64,
    };
    let one = Complex64::new(1.0, 0.0);
    let terms: Vec<f64> = (3..=n_max.max(2))
        .into_par_iter()
        .map(|n| {
            let d = (n * n - 4) as f64;
            Ok(2.0 * d.sqrt() * zagier_l(n, one)?.value.re)
        })
        .collect::<Result<_>>()?;
    Ok(PsiResult { x, value: pairwise_sum(&terms), method: PsiMethod::ViaZagier, terms: terms.len() as u64 })
}

#[derive(Debug, Clone, Copy)]
pub struct TraceIdentity {
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub relative_gap: f64,
}

/// `2 sqrt(n^2-4) L_{n^2-4}(1)` against `sum_g h(D/g^2) 2 log eps_{D/g^2}`.
pub fn trace_identity_check(n: u64, cache: &ClassDataCache) -> Result<TraceIdentity> {
    if !(3..=10_000).contains(&n) {
        return Err(Error::Precondition(format!("trace identity check needs 3 <= n <= 1e4, got {n}")));
    }
    let d = (n * n - 4) as f64;
    let lhs = 2.0 * d.sqrt() * zagier_l(n, Complex64::new(1.0, 0.0))?.value.re;
    let levels: Vec<u64> = primitive_levels(n)?.into_iter().map(|(_, d)| d).collect();
    let rows = cache.get_many(&levels)?;
    let parts: Vec<f64> = rows.iter().map(|r| 2.0 * r.class_count as f64 * r.regulator).collect();
    let rhs = pairwise_sum(&parts);
    Ok(TraceIdentity { n, lhs, rhs, relative_gap: (lhs - rhs).abs() / rhs.abs() })
}

/// Brute-force minimal Pell solution, for small `D` only.
pub fn fundamental_solution_brute(d: u64, u_max: u64) -> Option<(u64, u64)> {
    (1..=u_max).find_map(|u| {
        let v = d.checked_mul(u * u)? + 4;
        is_square(v).then(|| (isqrt(v), u))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zagier::zagier_l;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn golden_log() -> f64 {
        ((1.0 + 5f64.sqrt()) / 2.0).ln()
    }

    #[test]
    fn small_class_counts() {
        assert_eq!(reduced_form_cycles(5).unwrap(), 1);
        assert_eq!(reduced_form_cycles(8).unwrap(), 1);
        assert_eq!(reduced_form_cycles(12).unwrap(), 2);
        assert_eq!(reduced_form_cycles(40).unwrap(), 2);
        assert!(reduced_form_cycles(7).is_err());
        assert!(reduced_form_cycles(16).is_err());
        let forms = reduced_forms(5).unwrap();
        assert_eq!(forms.len(), 2);
        assert!(forms.contains(&(1, 1, -1)) && forms.contains(&(-1, 1, 1)));
    }

    #[test]
    fn rho_stays_in_reduced_set() {
        for d in [5u64, 13, 21, 45, 60, 96, 221, 1005, 4620] {
            let root = (d as f64).sqrt();
            for f in reduced_forms(d).unwrap() {
                let g = rho(f, d as i64, root);
                assert!(is_reduced(g, root), "D={d} {f:?} -> {g:?}");
                assert_eq!(g.1 * g.1 - 4 * g.0 * g.2, d as i64);
            }
        }
    }

    #[test]
    fn pell_examples() {
        assert_eq!(fundamental_solution(5).unwrap(), (3, 1));
        assert_eq!(fundamental_solution(8).unwrap(), (6, 2));
        assert_eq!(fundamental_solution(12).unwrap(), (4, 1));
        assert_eq!(fundamental_solution(45).unwrap(), (7, 1));
    }

    #[test]
    fn pell_matches_brute_force() {
        for d in 5..3000u64 {
            if d % 4 > 1 || is_square(d) {
                continue;
            }
            match (fundamental_solution(d), fundamental_solution_brute(d, 200_000)) {
                (Ok((t, u)), Some((bt, bu))) => assert_eq!((t, u), (bt as u128, bu as u128), "D={d}"),
                (Ok((_, u)), None) => assert!(u > 200_000, "D={d}"),
                (Err(Error::Overflow(_)), None) => {}
                (other, brute) => panic!("D={d}: {other:?} vs {brute:?}"),
            }
        }
    }

    #[test]
    fn regulator_from_period_matches_unit() {
        for d in [5u64, 13, 61, 109, 433, 1021, 4093] {
            let (pell, reg_cf) = pell_and_regulator(d).unwrap();
            let data = form_class_data(d).unwrap();
            assert!((reg_cf - data.regulator).abs() < 1e-10 * data.regulator, "D={d}");
            assert!(pell.is_some());
        }
        let big = form_class_data(999_997 * 4 + 1).unwrap();
        assert!(big.regulator > 0.0);
    }

    #[test]
    fn class_number_formula() {
        // sqrt(D) L_D(1) = sum_g h(D/g^2) log eps_{D/g^2}
        let cache = ClassDataCache::in_memory();
        for n in [3u64, 4, 5, 7, 11, 18, 47, 123] {
            let c = trace_identity_check(n, &cache).unwrap();
            assert!(c.relative_gap < 1e-10, "n={n} {c:?}");
        }
    }

    #[test]
    fn trace_identity_examples() {
        let cache = ClassDataCache::in_memory();
        let c = trace_identity_check(3, &cache).unwrap();
        assert!((c.rhs - 4.0 * golden_log()).abs() < 1e-13);
        let c7 = trace_identity_check(7, &cache).unwrap();
        // two classes: the primitive class of D = 45 and the square of the trace-3 class
        let d45 = cache.get(45).unwrap();
        assert!((c7.rhs - 2.0 * d45.class_count as f64 * d45.regulator - 4.0 * golden_log()).abs() < 1e-12);
        assert!(trace_identity_check(2, &cache).is_err());
    }

    #[test]
    fn psi_small_values() {
        let cache = ClassDataCache::in_memory();
        assert!(psi_direct(4.0, &cache).is_err());
        let p6 = psi_direct(6.0, &cache).unwrap();
        assert_eq!(p6.value, 0.0);
        assert_eq!(psi_via_zagier(6.0, TraceRange::NormCutoff).unwrap().value, 0.0);
        let p7 = psi_direct(7.0, &cache).unwrap();
        assert!((p7.value - 4.0 * golden_log()).abs() < 1e-13);
        assert_eq!(p7.terms, 1);
        let z7 = psi_via_zagier(7.0, TraceRange::NormCutoff).unwrap();
        assert!((z7.value - p7.value).abs() < 1e-12);
        let l5 = zagier_l(3, Complex64::new(1.0, 0.0)).unwrap().value.re;
        assert!((z7.value - 2.0 * 5f64.sqrt() * l5).abs() < 1e-15);
    }

    #[test]
    fn psi_methods_agree() {
        let cache = ClassDataCache::in_memory();
        for x in [100.0, 1000.0, 12345.0] {
            let a = psi_direct(x, &cache).unwrap().value;
            let b = psi_via_zagier(x, TraceRange::NormCutoff).unwrap().value;
            assert!((a - b).abs() <= 1e-9 * a, "X={x}: {a} vs {b}");
        }
        // the literal trace range overshoots
        let lit = psi_via_zagier(100.0, TraceRange::Literal).unwrap().value;
        assert!(lit > 10.0 * psi_direct(100.0, &cache).unwrap().value);
    }

    #[test]
    fn norm_cutoff_boundaries() {
        assert_eq!(max_trace_for_norm(6.0), 2);
        assert_eq!(max_trace_for_norm(7.0), 3);
        assert_eq!(max_trace_for_norm(class_norm(10)), 10);
        assert_eq!(max_trace_for_norm(class_norm(10) * (1.0 - 1e-12)), 9);
    }

    #[test]
    fn cache_round_trip_and_validation() {
        let dir = std::env::temp_dir().join(format!("classdata-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let path = dir.join("class_data.csv");
        let cache = ClassDataCache::open(&path).unwrap();
        let rows = cache.get_many(&[5, 45, 12, 999_997 * 4 + 1]).unwrap();
        drop(cache);
        let again = ClassDataCache::open(&path).unwrap();
        assert_eq!(again.len(), 4);
        for r in rows {
            let s = again.get(r.d).unwrap();
            assert_eq!(s.class_count, r.class_count);
            assert_eq!(s.pell, r.pell);
            assert!((s.regulator - r.regulator).abs() <= 1e-15 * r.regulator);
        }
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replace("5,1,3,1,", "5,1,3,2,")).unwrap();
        match ClassDataCache::open(&path) {
            Err(Error::Parse { line, .. }) => assert!(line >= 2),
            other => panic!("expected a parse error, got {:?}", other.map(|c| c.len())),
        }
        let _ = std::fs::remove_dir_all(&dir);
    }

    proptest! {
        #[test]
        fn pell_solutions_are_exact(k in 2u64..250_000) {
            let d = if k % 2 == 0 { 4 * k } else { 4 * k + 1 };
            prop_assume!(!is_square(d));
            let data = form_class_data(d).unwrap();
            prop_assert!(data.class_count >= 1);
            prop_assert!(data.regulator > 0.0);
            if let Some((t, u)) = data.pell {
                let (t, u) = (BigInt::from(t), BigInt::from(u));
                prop_assert_eq!(&t * &t - BigInt::from(d) * &u * &u, BigInt::from(4));
            }
        }
    }
}
