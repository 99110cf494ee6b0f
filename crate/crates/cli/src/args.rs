use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "zagier", version, about = "Zagier L-series, prime geodesics and Kloosterman sums on the modular surface")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Directory holding eigenvalue tables and caches.
    #[arg(long, global = true, env = "ZAGIER_DATA", default_value = "data")]
    pub data_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Neither read nor write the on-disk caches.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Suppress progress on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One value of L_{n^2-4}(s).
    Zagier {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        s_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        s_im: f64,
        /// Use the truncated Dirichlet series with this many terms.
        #[arg(long)]
        q_max: Option<usize>,
    },
    /// Psi(X) by class enumeration and through L-values.
    Psi {
        #[arg(long = "X")]
        x: f64,
    },
    /// Trace identity for every trace in a range.
    VerifyIdentity {
        #[arg(long, default_value_t = 3)]
        n_min: u64,
        #[arg(long)]
        n_max: u64,
    },
    /// Partial sum, main term and error at one X.
    Average {
        #[arg(long = "X")]
        x: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
    },
    /// E_t(X) on a log-spaced grid with an exponent fit.
    ErrorScan {
        #[arg(long = "X-min")]
        x_min: f64,
        #[arg(long = "X-max")]
        x_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
    },
    /// max |E_t(x)| / sqrt(x) over decades [10^k, 10^{k+1}].
    OmegaScan {
        #[arg(long, default_value_t = 3)]
        k_min: u32,
        #[arg(long, default_value_t = 5)]
        k_max: u32,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
    },
    /// Window properties and the two smoothed-error evaluations.
    SmoothCheck {
        #[arg(long = "X")]
        x: f64,
        #[arg(long, default_value_t = 0.1)]
        delta1: f64,
        #[arg(long, default_value_t = 0.5)]
        delta2: f64,
        /// Sample points per transition zone.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// sum_{t_j <= T} X^{i t_j}.
    SpectralSum {
        #[arg(long = "X")]
        x: f64,
        #[arg(long = "T")]
        t: f64,
        /// Divide each term by 1/2 + i t_j.
        #[arg(long)]
        weighted: bool,
        #[command(flatten)]
        table: TableArg,
    },
    /// Psi(X) - X minus the spectral term, against (X/T) log^2 X.
    ExplicitFormula {
        #[arg(long = "X", num_args = 1.., required = true)]
        x: Vec<f64>,
        #[arg(long = "T", num_args = 1.., required = true)]
        t: Vec<f64>,
        #[command(flatten)]
        table: TableArg,
    },
    /// S(m, n; c) for a range of moduli, with the Weil bound.
    Kloosterman {
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        m: i64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, default_value_t = 1)]
        c_min: u64,
        #[arg(long)]
        c_max: u64,
    },
    /// sum_{c <= C} e(D/c) S(n, n; c) / c.
    Linnik {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long = "C")]
        c: f64,
        #[arg(long = "D", default_value_t = 1)]
        d: i64,
    },
    /// The weighted Kloosterman sum, optionally cross-checked by partial summation.
    WeightedSum {
        #[arg(long = "N")]
        big_n: f64,
        #[arg(long = "X")]
        x: f64,
        #[arg(long = "T")]
        t: f64,
        #[arg(long, default_value_t = 5000)]
        q_max: u64,
        /// Also evaluate the summation-by-parts form.
        #[arg(long)]
        check: bool,
    },
    /// |L_{n^2-4}(1/2)| / n^{1/3} for 3 <= n <= n_max.
    SubconvexityScan {
        #[arg(long)]
        n_max: u64,
    },
    /// Extend the on-disk L-value store for one t.
    CacheBuild {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(long)]
        n_max: u64,
        #[arg(long, default_value_t = 10_000)]
        chunk: u64,
    },
}

#[derive(Debug, Args)]
pub struct TableArg {
    /// Eigenvalue file (default: <data-dir>/eigenvalues/psl2z.txt).
    #[arg(long)]
    pub eigenvalues: Option<PathBuf>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Zagier { .. } => "zagier",
            Command::Psi { .. } => "psi",
            Command::VerifyIdentity { .. } => "verify-identity",
            Command::Average { .. } => "average",
            Command::ErrorScan { .. } => "error-scan",
            Command::OmegaScan { .. } => "omega-scan",
            Command::SmoothCheck { .. } => "smooth-check",
            Command::SpectralSum { .. } => "spectral-sum",
            Command::ExplicitFormula { .. } => "explicit-formula",
            Command::Kloosterman { .. } => "kloosterman",
            Command::Linnik { .. } => "linnik",
            Command::WeightedSum { .. } => "weighted-sum",
            Command::SubconvexityScan { .. } => "subconvexity-scan",
            Command::CacheBuild { .. } => "cache-build",
        }
    }
}
