//! Tables of Laplace spectral parameters for the modular group, exponential
//! sums over them, the explicit-formula residual, and the parameters of the
//! test function used with the Kuznetsov-side sums.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geodesics::{psi_direct, ClassDataCache};
use crate::sum::pairwise_sum;
use crate::ComplexValue;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueTable {
    pub t_values: Vec<f64>,
    pub source: String,
    pub count: usize,
    /// Half a unit in the last printed decimal of the least precise entry.
    pub precision: f64,
}

impl EigenvalueTable {
    pub fn new(t_values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if t_values.is_empty() {
            return Err(Error::Validation("eigenvalue table is empty".into()));
        }
        for (i, &t) in t_values.iter().enumerate() {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::Validation(format!("entry {} = {t} is not a positive number", i + 1)));
            }
            if i > 0 && t <= t_values[i - 1] {
                return Err(Error::Validation(format!("entry {} = {t} is not above its predecessor", i + 1)));
            }
        }
        let count = t_values.len();
        Ok(EigenvalueTable { t_values, source: source.into(), count, precision: 0.0 })
    }

    /// Parses `#` header lines (kept as provenance) followed by one value per line.
    pub fn parse(text: &str, fallback_source: &str) -> Result<Self> {
        let mut header = Vec::new();
        let mut values = Vec::new();
        let mut precision: f64 = 0.0;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                if values.is_empty() {
                    header.push(h.trim().to_string());
                }
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|e| Error::Parse { line: i + 1, msg: format!("{line:?}: {e}") })?;
            let decimals = line.split_once('.').map_or(0, |(_, f)| f.len());
            precision = precision.max(0.5 * 10f64.powi(-(decimals as i32)));
            values.push(v);
        }
        let source = if header.is_empty() { fallback_source.to_string() } else { header.join("\n") };
        let mut table = Self::new(values, source)?;
        table.precision = precision;
        Ok(table)
    }

    pub fn count_up_to(&self, t: f64) -> usize {
        self.t_values.partition_point(|&x| x <= t)
    }

    pub fn max(&self) -> f64 {
        *self.t_values.last().expect("table is non-empty")
    }

    pub fn covers(&self, t: f64) -> bool {
        t <= self.max()
    }

    fn claims_modular_group(&self) -> bool {
        let s = self.source.to_ascii_lowercase();
        s.contains("psl(2,z)") || s.contains("psl2z") || s.contains("sl(2,z)") || s.contains("modular group")
    }

    /// Non-fatal sanity findings.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.claims_modular_group() && !(self.t_values[0] > 9.0 && self.t_values[0] < 10.0) {
            out.push(format!("first spectral parameter {} is outside (9, 10)", self.t_values[0]));
        }
        out
    }

    /// Warning when the phase error `t_j log X` reaches `1e-3`.
    pub fn phase_warning(&self, x: f64) -> Option<String> {
        let err = self.precision * x.ln();
        (err > 1e-3).then(|| format!("table precision {:e} gives phase error {err:e} at X = {x}", self.precision))
    }
}

pub fn load_eigenvalues(path: &Path) -> Result<EigenvalueTable> {
    let text = fs::read_to_string(path)?;
    EigenvalueTable::parse(&text, &path.display().to_string())
}

/// Two-term Weyl law for the modular surface:
/// `T^2/12 - (2T/pi) log(T / (e sqrt(pi/2)))`.
pub fn weyl_count(t: f64) -> f64 {
    t * t / 12.0 - 2.0 * t / PI * (t / (std::f64::consts::E * (PI / 2.0).sqrt())).ln()
}

/// `#{t_j <= T} / weyl_count(T)`.
pub fn weyl_ratio(table: &EigenvalueTable, t: f64) -> f64 {
    table.count_up_to(t) as f64 / weyl_count(t)
}

/// `sum_{t_j <= T} X^{i t_j}`.
pub fn exp_sum(table: &EigenvalueTable, x: f64, t: f64) -> ComplexValue {
    let lx = x.ln();
    let n = table.count_up_to(t);
    let terms: Vec<Complex64> =
        table.t_values[..n].par_iter().map(|&tj| Complex64::from_polar(1.0, tj * lx)).collect();
    pairwise_sum(&terms)
}

/// `sum_j t_j X^{i t_j} exp(-t_j / T)` over the whole table.
pub fn weighted_exp_sum(table: &EigenvalueTable, x: f64, t: f64) -> ComplexValue {
    if !(t > 0.0) {
        return Complex64::default();
    }
    let lx = x.ln();
    let terms: Vec<Complex64> = table
        .t_values
        .par_iter()
        .map(|&tj| Complex64::from_polar(tj * (-tj / t).exp(), tj * lx))
        .collect();
    pairwise_sum(&terms)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplicitFormula {
    pub x: f64,
    pub t: f64,
    pub psi: f64,
    pub spectral_term: f64,
    pub residual: f64,
    pub bound: f64,
    pub terms: usize,
    /// Whether `T <= sqrt(X) / log^2 X` holds.
    pub in_range: bool,
}

/// `Psi(X) - X - 2 sqrt(X) Re sum_{t_j <= T} X^{i t_j} / (1/2 + i t_j)`
/// together with the error scale `(X/T) log^2 X`.
pub fn explicit_formula_residual(
    table: &EigenvalueTable,
    x: f64,
    t: f64,
    cache: &ClassDataCache,
) -> Result<ExplicitFormula> {
    if !(t >= 1.0) {
        return Err(Error::Precondition(format!("explicit formula needs T >= 1, got {t}")));
    }
    if !table.covers(t) {
        return Err(Error::Precondition(format!("T = {t} exceeds the largest tabulated value {}", table.max())));
    }
    let lx = x.ln();
    let n = table.count_up_to(t);
    let terms: Vec<Complex64> = table.t_values[..n]
        .iter()
        .map(|&tj| Complex64::from_polar(1.0, tj * lx) / Complex64::new(0.5, tj))
        .collect();
    let spectral_term = 2.0 * x.sqrt() * pairwise_sum(&terms).re;
    let psi = psi_direct(x, cache)?.value;
    Ok(ExplicitFormula {
        x,
        t,
        psi,
        spectral_term,
        residual: psi - x - spectral_term,
        bound: x / t * lx * lx,
        terms: n,
        in_range: t <= x.sqrt() / (lx * lx),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunctionParams {
    pub x: f64,
    pub t: f64,
    pub beta: ComplexValue,
    pub c: ComplexValue,
    pub a: f64,
    pub b: f64,
    pub gamma_arg: f64,
}

pub fn test_function_params(x: f64, t: f64) -> Result<TestFunctionParams> {
    if !(x >= 2.0 && t >= 2.0) || !x.is_finite() || !t.is_finite() {
        return Err(Error::Domain(format!("test function needs X, T >= 2, got X = {x}, T = {t}")));
    }
    let beta = Complex64::new(0.5 * x.ln(), 0.5 / t);
    let c = Complex64::new(0.0, -1.0) * beta.cosh();
    let h = 0.5 * x.ln();
    let a = h.sinh() * (0.5 / t).sin();
    let b = h.cosh() * (0.5 / t).cos();
    Ok(TestFunctionParams { x, t, beta, c, a, b, gamma_arg: c.arg() + PI / 2.0 })
}

/// `phi(x) = (sinh^2 beta / 2 pi) x^2 exp(i x cosh beta)`.
pub fn phi_test(x: f64, p: &TestFunctionParams) -> ComplexValue {
    let sh = p.beta.sinh();
    sh * sh / (2.0 * PI) * (x * x) * (-p.c * x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(vals: &[f64]) -> EigenvalueTable {
        EigenvalueTable::new(vals.to_vec(), "test").unwrap()
    }

    #[test]
    fn parse_tables() {
        let t = EigenvalueTable::parse("# PSL(2,Z) sample\n9.533695\n12.173008\n13.779751\n", "x").unwrap();
        assert_eq!(t.count, 3);
        assert_eq!(t.source, "PSL(2,Z) sample");
        assert!((t.precision - 5e-7).abs() < 1e-18);
        assert!(t.warnings().is_empty());
        assert!(EigenvalueTable::parse("", "x").is_err());
        assert!(EigenvalueTable::parse("# only header\n", "x").is_err());
        assert!(matches!(EigenvalueTable::parse("12.1\n9.5\n", "x"), Err(Error::Validation(_))));
        assert!(matches!(EigenvalueTable::parse("9.5\n9.5\n", "x"), Err(Error::Validation(_))));
        assert!(matches!(EigenvalueTable::parse("-1\n", "x"), Err(Error::Validation(_))));
        match EigenvalueTable::parse("# h\n9.5\nabc\n", "x") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let odd = EigenvalueTable::parse("# PSL(2,Z)\n11.0\n", "x").unwrap();
        assert_eq!(odd.warnings().len(), 1);
    }

    #[test]
    fn exp_sum_trivial_cases() {
        let t = table(&[9.5, 12.1, 13.7]);
        assert_eq!(exp_sum(&t, 5.0, 9.0), Complex64::default());
        let at_one = exp_sum(&t, 1.0, 13.0);
        assert_eq!(at_one, Complex64::new(2.0, 0.0));
        let single = exp_sum(&table(&[10.0]), std::f64::consts::E, 11.0);
        assert!((single - Complex64::from_polar(1.0, 10.0)).norm() < 1e-14);
        for x in [2.0, 100.0, 1e6] {
            assert!(exp_sum(&t, x, 20.0).norm() <= 3.0 + 1e-12);
        }
    }

    #[test]
    fn weighted_sum_trivial_cases() {
        let t = table(&[9.5, 12.1]);
        let w = weighted_exp_sum(&t, 1.0, 10.0);
        let want = 9.5 * (-0.95f64).exp() + 12.1 * (-1.21f64).exp();
        assert!((w.re - want).abs() < 1e-13 && w.im == 0.0);
        assert_eq!(weighted_exp_sum(&t, 3.0, 0.0), Complex64::default());
        assert!(weighted_exp_sum(&t, 3.0, 1e-3).norm() < 1e-100);
        let one = weighted_exp_sum(&table(&[10.0]), std::f64::consts::E, 10.0);
        assert!((one - Complex64::from_polar(10.0 / std::f64::consts::E, 10.0)).norm() < 1e-13);
    }

    #[test]
    fn explicit_formula_empty_spectrum() {
        let t = table(&[9.5, 12.1]);
        let cache = ClassDataCache::in_memory();
        let r = explicit_formula_residual(&t, 100.0, 5.0, &cache).unwrap();
        let psi = psi_direct(100.0, &cache).unwrap().value;
        assert_eq!(r.terms, 0);
        assert_eq!(r.residual, psi - 100.0);
        assert!((r.bound - 100.0 * 100f64.ln().powi(2) / 5.0).abs() < 1e-9);
        assert!(explicit_formula_residual(&t, 100.0, 0.5, &cache).is_err());
        assert!(explicit_formula_residual(&t, 100.0, 13.0, &cache).is_err());
    }

    #[test]
    fn test_function_identities() {
        for (x, t) in [(1e3, 10.0), (1e4, 30.0), (1e6, 1000.0), (2.0, 2.0)] {
            let p = test_function_params(x, t).unwrap();
            // cosh(u + iv) = cosh u cos v + i sinh u sin v.
            let (u, v) = (0.5 * x.ln(), 0.5 / t);
            assert!((p.c.re - u.sinh() * v.sin()).abs() < 1e-12 * p.c.norm());
            assert!((p.c.im + u.cosh() * v.cos()).abs() < 1e-12 * p.c.norm());
            assert!((p.c - Complex64::new(p.a, -p.b)).norm() < 1e-12 * p.c.norm());
            let xx = 3.7;
            let sh = p.beta.sinh().norm();
            let want = sh * sh / (2.0 * PI) * xx * xx * (-xx * p.a).exp();
            assert!((phi_test(xx, &p).norm() - want).abs() < 1e-12 * want);
        }
        assert!(test_function_params(1.0, 10.0).is_err());
    }

    #[test]
    fn gamma_arg_scaling() {
        for k in 3..=6 {
            let x = 10f64.powi(k);
            let mut t = 10.0;
            while t <= x.sqrt() {
                let p = test_function_params(x, t).unwrap();
                assert!(p.gamma_arg > 0.0);
                let g = p.gamma_arg * t;
                assert!((0.25..=4.0).contains(&g), "X={x} T={t} gamma*T={g}");
                t *= 1.7;
            }
        }
    }

    #[test]
    fn weyl_law_shape() {
        assert!(weyl_count(20.0) > 9.0 && weyl_count(20.0) < 12.0);
        assert!(weyl_count(100.0) < 100.0 * 100.0 / 12.0);
    }
}
