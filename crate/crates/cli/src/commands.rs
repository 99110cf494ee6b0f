use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use rayon::prelude::*;

use zagier_core::averages::{
    error_scan_with, exponent_fit, log_grid, main_term_integral, omega_sup, ErrorTerm, PrefixSums, MAX_PARTIAL_SUM_X,
    MAX_T,
};
use zagier_core::cache::LValueStore;
use zagier_core::geodesics::{psi_direct, psi_via_zagier, trace_identity_check, ClassDataCache, TraceRange};
use zagier_core::kloosterman::{kloosterman, linnik_sum, weil_bound, WeightedKloosterman, MAX_MODULUS};
use zagier_core::smoothing::{
    required_trace, smoothed_error_direct_with, smoothed_error_via_window_with, window_checks,
};
use zagier_core::spectral::{exp_sum, explicit_formula_residual, load_eigenvalues, weighted_exp_sum, weyl_ratio};
use zagier_core::zagier::{extend_store, subconvexity_scan, zagier_l, zagier_l_series};
use zagier_core::{EigenvalueTable, LMethod, ScanRecord, WindowParams};

use crate::args::{Command, Global, TableArg};
use crate::output::{Cell, Table};

/// Bad input; maps to exit code 1.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid argument: {}", self.0)
    }
}
impl std::error::Error for Invalid {}

/// A computed invariant did not hold; maps to exit code 2.
#[derive(Debug)]
pub struct InvariantFailed(pub String);

impl std::fmt::Display for InvariantFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invariant failed: {}", self.0)
    }
}
impl std::error::Error for InvariantFailed {}

macro_rules! invalid {
    ($($arg:tt)*) => {
        return Err(anyhow::Error::new(Invalid(format!($($arg)*))))
    };
}

pub struct Ctx {
    pub global: Global,
    pub interrupted: Arc<AtomicBool>,
}

/// Rate-limited progress lines on stderr.
struct Progress<'a> {
    ctx: &'a Ctx,
    label: &'static str,
    last: Instant,
}

impl Progress<'_> {
    fn tick(&mut self, done: impl std::fmt::Display, total: impl std::fmt::Display) {
        if !self.ctx.global.quiet && self.last.elapsed() >= Duration::from_millis(500) {
            eprintln!("[{}] {done}/{total}", self.label);
            self.last = Instant::now();
        }
    }
}

impl Ctx {
    fn interrupted(&self) -> bool {
        self.interrupted.load(Ordering::SeqCst)
    }

    fn progress(&self, label: &'static str) -> Progress<'_> {
        Progress { ctx: self, label, last: Instant::now() }
    }

    fn warn(&self, msg: &str) {
        eprintln!("warning: {msg}");
    }

    fn table(&self, command: &str, columns: Vec<&'static str>, metadata: Vec<(String, String)>) -> Result<Table> {
        let mut meta = metadata;
        meta.push(("data_dir".into(), self.global.data_dir.display().to_string()));
        meta.push(("cache".into(), (!self.global.no_cache).to_string()));
        Table::new(self.global.format, self.global.output.as_deref(), command, columns, meta)
            .context("opening output")
    }

    fn class_cache(&self) -> Result<ClassDataCache> {
        if self.global.no_cache {
            return Ok(ClassDataCache::in_memory());
        }
        Ok(ClassDataCache::open(&self.global.data_dir.join("cache/classes.csv"))?)
    }

    /// Prefix sums of `L_{n^2-4}(1/2 + it)` up to `n_max`, from (and into) the
    /// on-disk store unless caching is off. Both routes give identical values.
    fn prefix_sums(&self, t: f64, n_max: u64) -> Result<PrefixSums> {
        if n_max < 3 {
            return Ok(PrefixSums::from_values(t, &[]));
        }
        if self.global.no_cache {
            return Ok(PrefixSums::compute(t, n_max)?);
        }
        let mut store = LValueStore::open(&self.global.data_dir.join("cache"), t)?;
        if store.max_trace() < n_max {
            let mut progress = self.progress("L-values");
            extend_store(&mut store, n_max, 10_000, || !self.interrupted(), |hi| progress.tick(hi, n_max))?;
        }
        Ok(PrefixSums::from_store(&store, n_max)?)
    }

    fn eigenvalues(&self, arg: &TableArg) -> Result<EigenvalueTable> {
        let path = arg.eigenvalues.clone().unwrap_or_else(|| self.global.data_dir.join("eigenvalues/psl2z.txt"));
        let table = load_eigenvalues(&path).with_context(|| format!("loading {}", path.display()))?;
        for w in table.warnings() {
            self.warn(&w);
        }
        Ok(table)
    }
}

fn meta(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn check_t(t: f64) -> Result<()> {
    if !(t.abs() <= MAX_T) {
        invalid!("|t| must be at most {MAX_T}, got {t}");
    }
    Ok(())
}

fn scan_row(r: &ScanRecord) -> Vec<Cell> {
    vec![
        r.x.into(),
        r.partial_sum.re.into(),
        r.partial_sum.im.into(),
        r.main_term.re.into(),
        r.main_term.im.into(),
        r.error.re.into(),
        r.error.im.into(),
        r.normalized.into(),
    ]
}

const SCAN_COLUMNS: [&str; 8] = ["X", "sum_re", "sum_im", "main_re", "main_im", "err_re", "err_im", "normalized"];

/// Runs one subcommand; returns whether the output was truncated by Ctrl-C.
pub fn run(ctx: &Ctx, command: &Command) -> Result<bool> {
    let name = command.name();
    match *command {
        Command::Zagier { n, s_re, s_im, q_max } => {
            let s = Complex64::new(s_re, s_im);
            let v = match q_max {
                Some(q) => zagier_l_series(n, s, q)?,
                None => zagier_l(n, s)?,
            };
            let method = match v.method {
                LMethod::Decomposition => "decomposition",
                LMethod::TruncatedSeries => "truncated_series",
            };
            let mut out = ctx.table(
                name,
                vec!["n", "s_re", "s_im", "re", "im", "method", "error_estimate"],
                meta(&[("q_max", q_max.map_or("none".into(), |q| q.to_string()))]),
            )?;
            out.push(vec![
                n.into(),
                s_re.into(),
                s_im.into(),
                v.value.re.into(),
                v.value.im.into(),
                method.into(),
                v.error_estimate.into(),
            ])?;
            out.finish(false)?;
            Ok(false)
        }

        Command::Psi { x } => {
            if !(x.is_finite() && x > 0.0) {
                invalid!("X must be positive, got {x}");
            }
            let cache = ctx.class_cache()?;
            let direct = psi_direct(x, &cache)?;
            let via = psi_via_zagier(x, TraceRange::NormCutoff)?;
            let gap = if direct.value == via.value { 0.0 } else { (direct.value - via.value).abs() / direct.value.abs() };
            let mut out = ctx.table(
                name,
                vec!["X", "direct", "via_zagier", "gap", "classes", "traces"],
                meta(&[("trace_range", "norm_cutoff".into()), ("tolerance", "1e-8".into())]),
            )?;
            out.push(vec![x.into(), direct.value.into(), via.value.into(), gap.into(), direct.terms.into(), via.terms.into()])?;
            out.finish(false)?;
            if !(gap <= 1e-8) {
                bail!(InvariantFailed(format!("psi gap {gap:e} above 1e-8 at X = {x}")));
            }
            Ok(false)
        }

        Command::VerifyIdentity { n_min, n_max } => {
            if !(3 <= n_min && n_min <= n_max && n_max <= 10_000) {
                invalid!("need 3 <= n-min <= n-max <= 10000, got [{n_min}, {n_max}]");
            }
            let cache = ctx.class_cache()?;
            let mut out =
                ctx.table(name, vec!["n", "lhs", "rhs", "gap"], meta(&[("tolerance", "1e-8".into())]))?;
            let mut progress = ctx.progress("verify-identity");
            let mut worst = (0.0f64, n_min);
            let mut truncated = false;
            for lo in (n_min..=n_max).step_by(256) {
                if ctx.interrupted() {
                    truncated = true;
                    break;
                }
                let hi = (lo + 255).min(n_max);
                let rows = (lo..=hi)
                    .into_par_iter()
                    .map(|n| trace_identity_check(n, &cache))
                    .collect::<zagier_core::Result<Vec<_>>>()?;
                for r in rows {
                    if r.relative_gap > worst.0 {
                        worst = (r.relative_gap, r.n);
                    }
                    out.push(vec![r.n.into(), r.lhs.into(), r.rhs.into(), r.relative_gap.into()])?;
                }
                progress.tick(hi, n_max);
            }
            out.note("max_gap", format!("{:e} at n = {}", worst.0, worst.1));
            out.finish(truncated)?;
            if !(worst.0 <= 1e-8) {
                bail!(InvariantFailed(format!("trace identity gap {:e} at n = {}", worst.0, worst.1)));
            }
            Ok(truncated)
        }

        Command::Average { x, t } => {
            check_t(t)?;
            if !(2.0..=MAX_PARTIAL_SUM_X).contains(&x) {
                invalid!("X must lie in [2, 1e7], got {x}");
            }
            let sums = ctx.prefix_sums(t, x.floor() as u64)?;
            let record = ScanRecord::new(x, sums.at(x)?, main_term_integral(x, t)?);
            let mut out = ctx.table(name, SCAN_COLUMNS.to_vec(), meta(&[("t", t.to_string())]))?;
            out.push(scan_row(&record))?;
            out.finish(false)?;
            Ok(false)
        }

        Command::ErrorScan { x_min, x_max, points, t } => {
            check_t(t)?;
            if !(3.0 <= x_min && x_min < x_max && x_max <= MAX_PARTIAL_SUM_X) {
                invalid!("need 3 <= X-min < X-max <= 1e7, got [{x_min}, {x_max}]");
            }
            if points < 2 {
                invalid!("need at least 2 points, got {points}");
            }
            let sums = ctx.prefix_sums(t, x_max.floor() as u64)?;
            let grid = log_grid(x_min, x_max, points);
            let mut out = ctx.table(
                name,
                SCAN_COLUMNS.to_vec(),
                meta(&[("t", t.to_string()), ("points", points.to_string()), ("grid", "log".into())]),
            )?;
            let mut records = Vec::with_capacity(points);
            let mut truncated = false;
            let mut progress = ctx.progress("error-scan");
            for chunk in grid.chunks(32) {
                if ctx.interrupted() {
                    truncated = true;
                    break;
                }
                for r in error_scan_with(&sums, chunk)? {
                    out.push(scan_row(&r))?;
                    records.push(r);
                }
                progress.tick(records.len(), points);
            }
            match exponent_fit(&records) {
                Ok(fit) => {
                    out.note("fit_slope", fit.slope);
                    out.note("fit_intercept", fit.intercept);
                    out.note("fit_r_squared", fit.r_squared);
                }
                Err(e) => out.note("fit", format!("unavailable: {e}")),
            }
            out.finish(truncated)?;
            Ok(truncated)
        }

        Command::OmegaScan { k_min, k_max, t } => {
            check_t(t)?;
            if !(k_min <= k_max && k_max <= 6) {
                invalid!("need k-min <= k-max <= 6, got [{k_min}, {k_max}]");
            }
            let top = 10u64.pow(k_max + 1);
            let err = ErrorTerm::new(ctx.prefix_sums(t, top)?)?;
            let mut out = ctx.table(
                name,
                vec!["k", "lo", "hi", "max_normalized", "argmax"],
                meta(&[("t", t.to_string()), ("threshold", "0.005".into())]),
            )?;
            let mut truncated = false;
            for k in k_min..=k_max {
                if ctx.interrupted() {
                    truncated = true;
                    break;
                }
                let w = omega_sup(&err, 10u64.pow(k), 10u64.pow(k + 1))?;
                out.push(vec![u64::from(k).into(), w.lo.into(), w.hi.into(), w.max_normalized.into(), w.argmax.into()])?;
            }
            out.finish(truncated)?;
            Ok(truncated)
        }

        Command::SmoothCheck { x, delta1, delta2, samples } => {
            let params = WindowParams::new(x, delta1, delta2)?;
            if params.support().0 < 2.0 {
                invalid!("window support must lie in x >= 2");
            }
            let checks = window_checks(&params, samples)?;
            let err = ErrorTerm::new(ctx.prefix_sums(0.0, required_trace(&params))?)?;
            let direct = smoothed_error_direct_with(&params, &err)?;
            let window = smoothed_error_via_window_with(&params, &err)?;
            let rel = if direct == window { 0.0 } else { (direct - window).abs() / direct.abs() };
            let mut out = ctx.table(
                name,
                vec!["property", "value", "bound", "holds"],
                meta(&[
                    ("X", x.to_string()),
                    ("delta1", delta1.to_string()),
                    ("delta2", delta2.to_string()),
                    ("samples", samples.to_string()),
                ]),
            )?;
            let mut failed = Vec::new();
            for c in &checks {
                out.push(vec![c.property.into(), c.value.into(), c.bound.into(), c.holds.into()])?;
                if !c.holds {
                    failed.push(c.property);
                }
            }
            let agree = rel <= 1e-6;
            out.push(vec!["direct_vs_window".into(), rel.into(), 1e-6.into(), agree.into()])?;
            if !agree {
                failed.push("direct_vs_window");
            }
            out.note("smoothed_direct", direct);
            out.note("smoothed_via_window", window);
            out.finish(false)?;
            if !failed.is_empty() {
                bail!(InvariantFailed(format!("window checks failed: {}", failed.join(", "))));
            }
            Ok(false)
        }

        Command::SpectralSum { x, t, weighted, ref table } => {
            if !(x > 1.0 && x.is_finite()) {
                invalid!("X must exceed 1, got {x}");
            }
            let table = ctx.eigenvalues(table)?;
            if !weighted && !table.covers(t) {
                invalid!("T = {t} exceeds the largest tabulated value {}", table.max());
            }
            if let Some(w) = table.phase_warning(x) {
                ctx.warn(&w);
            }
            let v = if weighted { weighted_exp_sum(&table, x, t) } else { exp_sum(&table, x, t) };
            let mut out = ctx.table(
                name,
                vec!["X", "T", "re", "im", "abs", "terms", "weyl_ratio"],
                meta(&[("weighted", weighted.to_string()), ("source", table.source.clone())]),
            )?;
            let terms = if weighted { table.count } else { table.count_up_to(t) };
            out.push(vec![
                x.into(),
                t.into(),
                v.re.into(),
                v.im.into(),
                v.norm().into(),
                terms.into(),
                weyl_ratio(&table, t.min(table.max())).into(),
            ])?;
            out.finish(false)?;
            Ok(false)
        }

        Command::ExplicitFormula { ref x, ref t, ref table } => {
            let table = ctx.eigenvalues(table)?;
            for &xv in x {
                if !(xv > 2.0 && xv <= 1e8) {
                    invalid!("X must lie in (2, 1e8], got {xv}");
                }
                if let Some(w) = table.phase_warning(xv) {
                    ctx.warn(&w);
                }
            }
            for &tv in t {
                if !(tv >= 1.0 && table.covers(tv)) {
                    invalid!("T must lie in [1, {}], got {tv}", table.max());
                }
            }
            let cache = ctx.class_cache()?;
            let mut out = ctx.table(
                name,
                vec!["X", "T", "psi", "spectral_term", "residual", "bound", "ratio", "terms", "in_range"],
                meta(&[("source", table.source.clone()), ("eigenvalues", table.count.to_string())]),
            )?;
            let mut truncated = false;
            'outer: for &xv in x {
                for &tv in t {
                    if ctx.interrupted() {
                        truncated = true;
                        break 'outer;
                    }
                    let f = explicit_formula_residual(&table, xv, tv, &cache)?;
                    if !f.in_range {
                        ctx.warn(&format!("T = {tv} exceeds sqrt(X)/log^2 X at X = {xv}"));
                    }
                    out.push(vec![
                        xv.into(),
                        tv.into(),
                        f.psi.into(),
                        f.spectral_term.into(),
                        f.residual.into(),
                        f.bound.into(),
                        (f.residual.abs() / f.bound).into(),
                        f.terms.into(),
                        f.in_range.into(),
                    ])?;
                }
            }
            out.finish(truncated)?;
            Ok(truncated)
        }

        Command::Kloosterman { m, n, c_min, c_max } => {
            if !(1 <= c_min && c_min <= c_max && c_max <= MAX_MODULUS) {
                invalid!("need 1 <= c-min <= c-max <= {MAX_MODULUS}, got [{c_min}, {c_max}]");
            }
            let mut out = ctx.table(
                name,
                vec!["c", "S", "weil_bound"],
                meta(&[("m", m.to_string()), ("n", n.to_string())]),
            )?;
            let mut truncated = false;
            let mut progress = ctx.progress("kloosterman");
            let mut lo = c_min;
            while lo <= c_max {
                if ctx.interrupted() {
                    truncated = true;
                    break;
                }
                let hi = (lo + 1023).min(c_max);
                let rows = (lo..=hi)
                    .into_par_iter()
                    .map(|c| Ok((c, kloosterman(m, n, c)?.value.re, weil_bound(m, n, c)?)))
                    .collect::<zagier_core::Result<Vec<_>>>()?;
                for (c, s, w) in rows {
                    out.push(vec![c.into(), s.into(), w.into()])?;
                }
                progress.tick(hi, c_max);
                lo = hi + 1;
            }
            out.finish(truncated)?;
            Ok(truncated)
        }

        Command::Linnik { n, c, d } => {
            let v = linnik_sum(n, c, d)?;
            let mut out = ctx.table(name, vec!["C", "D", "n", "re", "im", "abs"], Vec::new())?;
            out.push(vec![c.into(), d.into(), n.into(), v.re.into(), v.im.into(), v.norm().into()])?;
            out.finish(false)?;
            Ok(false)
        }

        Command::WeightedSum { big_n, x, t, q_max, check } => {
            let w = WeightedKloosterman::new(big_n, x, t, q_max)?;
            let direct = w.direct()?;
            let mut columns = vec!["N", "X", "T", "re", "im", "q_min", "q_max", "tail_estimate"];
            if check {
                columns.extend(["parts_re", "parts_im", "rel_gap"]);
            }
            let mut out = ctx.table(name, columns, meta(&[("tolerance", "1e-6".into())]))?;
            let mut row: Vec<Cell> = vec![
                big_n.into(),
                x.into(),
                t.into(),
                direct.value.re.into(),
                direct.value.im.into(),
                direct.q_min.into(),
                direct.q_max.into(),
                direct.tail_estimate.into(),
            ];
            let mut gap = 0.0;
            if check {
                let parts = w.by_parts()?;
                gap = (direct.value - parts.value).norm() / direct.value.norm().max(f64::MIN_POSITIVE);
                row.extend([parts.value.re.into(), parts.value.im.into(), gap.into()]);
            }
            out.push(row)?;
            out.finish(false)?;
            if !(gap <= 1e-6) {
                bail!(InvariantFailed(format!("direct and summation-by-parts forms differ by {gap:e}")));
            }
            Ok(false)
        }

        Command::SubconvexityScan { n_max } => {
            if !(3..=100_000).contains(&n_max) {
                invalid!("need 3 <= n-max <= 1e5, got {n_max}");
            }
            let rows = subconvexity_scan(n_max)?;
            let mut out = ctx.table(name, vec!["n", "abs_l", "normalized"], Vec::new())?;
            let mut worst = (0.0f64, 3);
            for r in &rows {
                if r.normalized > worst.0 {
                    worst = (r.normalized, r.n);
                }
                out.push(vec![r.n.into(), r.abs_l.into(), r.normalized.into()])?;
            }
            out.note("max_normalized", format!("{:e} at n = {}", worst.0, worst.1));
            out.finish(false)?;
            Ok(false)
        }

        Command::CacheBuild { t, n_max, chunk } => {
            check_t(t)?;
            if ctx.global.no_cache {
                invalid!("cache-build cannot run with --no-cache");
            }
            if !(3..=MAX_PARTIAL_SUM_X as u64).contains(&n_max) {
                invalid!("need 3 <= n-max <= 1e7, got {n_max}");
            }
            let dir: PathBuf = ctx.global.data_dir.join("cache");
            let mut store = LValueStore::open(&dir, t)?;
            let before = store.max_trace();
            let mut progress = ctx.progress("cache-build");
            let result = extend_store(&mut store, n_max, chunk, || !ctx.interrupted(), |hi| progress.tick(hi, n_max));
            let truncated = matches!(result, Err(zagier_core::Error::Interrupted));
            if !truncated {
                result?;
            }
            let mut out = ctx.table(name, vec!["t", "first_trace", "max_trace", "added", "path"], Vec::new())?;
            out.push(vec![
                t.into(),
                3u64.into(),
                store.max_trace().into(),
                store.max_trace().saturating_sub(before).into(),
                store.path().display().to_string().into(),
            ])?;
            out.finish(truncated)?;
            Ok(truncated)
        }
    }
}
