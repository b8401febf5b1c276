use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "poincare", version, about = "Lattice sums and Poincare series on II(25,1)")]
pub struct Cli {
    /// Single-threaded run with bit-reproducible output.
    #[arg(long, global = true)]
    pub deterministic: bool,

    /// Cache directory.
    #[arg(long, global = true, env = "POINCARE_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Wall-clock budget in seconds.
    #[arg(long, global = true, default_value_t = 60.0)]
    pub max_seconds: f64,

    /// Largest number of cosets a finite-sum enumeration may visit.
    #[arg(long, global = true, default_value_t = 1 << 25)]
    pub max_cosets: u64,

    /// Largest number of lattice points a series or root enumeration may visit.
    #[arg(long, global = true, default_value_t = 1 << 31)]
    pub max_points: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lattice descriptors and certificates.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Exponential sums.
    #[command(subcommand)]
    Sums(SumsCmd),
    /// Roots and the Weyl chamber.
    #[command(subcommand)]
    Geometry(GeometryCmd),
    /// Fourier coefficients and evaluation of E(z, s).
    #[command(subcommand)]
    Poincare(PoincareCmd),
    /// Oracle-equivalence suites.
    Verify(VerifyArgs),
    /// Cache administration.
    #[command(subcommand)]
    Cache(CacheCmd),
}

#[derive(Debug, Args)]
pub struct LatticeArg {
    /// `e8`, `ii11`, `leech` or `e8+ii11`.
    #[arg(long, default_value = "leech")]
    pub lattice: String,
}

#[derive(Debug, Subcommand)]
pub enum LatticeCmd {
    Info(LatticeArg),
    Certify(LatticeArg),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SumMethod {
    Brute,
    Closed,
}

#[derive(Debug, Subcommand)]
pub enum SumsCmd {
    /// Kloosterman sum S(a, b; n).
    Kloosterman {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long)]
        n: u64,
    },
    /// Jordan totient J_k(n).
    Jordan {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u64,
    },
    /// Gauss sum theta_{q,c} of a lattice.
    Theta {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        c: i64,
        #[arg(long, value_enum, default_value_t = SumMethod::Brute)]
        method: SumMethod,
    },
    /// j_{lambda,n}(d).
    J {
        #[command(flatten)]
        lattice: LatticeArg,
        /// Comma-separated coordinates, or `0`.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, value_enum, default_value_t = SumMethod::Closed)]
        method: SumMethod,
    },
    /// Partial sum of sum_n j_{lambda,n} n^{-s}.
    Dirichlet {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lambda: String,
        /// `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, default_value_t = 1000)]
        cutoff: u64,
        /// Primes whose multiples are skipped.
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<u64>,
    },
    /// Fiber sizes of M_{pq}(d) -> M_q(d).
    Hensel {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        d: i64,
    },
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long)]
    pub h: f64,
}

#[derive(Debug, Subcommand)]
pub enum GeometryCmd {
    /// Roots of a given height with l/n near a center.
    Roots {
        #[arg(long)]
        n: i64,
        /// `0`, `generic` or 24 comma-separated coordinates.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        radius_sq: f64,
        /// Print only the count.
        #[arg(long)]
        count_only: bool,
    },
    /// Smallest margin -<s_lambda, phi(v)> over nearby Leech roots.
    Chamber {
        #[command(flatten)]
        slice: SliceArgs,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        v: String,
        #[arg(long, default_value_t = 8.0)]
        radius_sq: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMethod {
    Direct,
    Fourier,
    FourierEnumerated,
    Both,
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Cutoff of the n-sums.
    #[arg(long, default_value_t = 40)]
    pub n_max: u64,
    /// Target relative accuracy of the adaptive cutoffs.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Fixed cutoff lambda^2 <= R (Fourier) or ball radius (direct).
    #[arg(long)]
    pub lambda_radius_sq: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum PoincareCmd {
    /// Fourier coefficients a_lambda(k, h, s).
    Coeff {
        #[command(flatten)]
        slice: SliceArgs,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Repeatable; comma-separated coordinates or `0`.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lambda: Vec<String>,
        #[arg(long, default_value_t = 40)]
        n_max: u64,
    },
    /// E(phi(v), s).
    Eval {
        #[command(flatten)]
        slice: SliceArgs,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        v: String,
        #[arg(long, value_enum, default_value_t = EvalMethod::Both)]
        method: EvalMethod,
        #[command(flatten)]
        policy: PolicyArgs,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name or `all`.
    pub suite: String,
    #[arg(long)]
    pub lattice: Option<String>,
    #[arg(long)]
    pub qmax: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum CacheCmd {
    List,
    Clear,
    Verify,
}
