use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(name = "chebgf", version, about = "Chebyshev generating functions: closed forms, oracles and checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Global {
    /// Seed for every random campaign.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (1 runs sequentially).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Tolerance override for the command's numeric check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Also write the NDJSON report to this file.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// TOML file with defaults for the flags above; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Contents of `--config`.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub tol: Option<f64>,
    pub json: Option<PathBuf>,
    pub trials: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Denominators w_n.
    #[command(subcommand)]
    W(WCmd),
    /// Generating functions χ_{k,n}^{(t)}.
    #[command(subcommand)]
    Chi(ChiCmd),
    /// Chebyshev Kibble-type sums f_T, f_U.
    #[command(subcommand)]
    Kibble(KibbleCmd),
    /// q-Hermite side: identities and probes.
    #[command(subcommand)]
    Q(QCmd),
    /// Acceptance campaigns.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand, Debug)]
pub enum WCmd {
    /// Emit w_n as Poly JSON.
    Build {
        #[arg(long)]
        n: usize,
        /// Use the recursive construction instead of the sign-vector product.
        #[arg(long)]
        recursive: bool,
    },
    /// Cross-check constructions, reference forms and degree bounds.
    Check {
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// `K,N` or `K,N:t1,…,t_{K+N}`; alternative to --k/--n/--t.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["k", "n", "t"])]
    pub spec: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Shifts, one per slot (default all zero).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Vec<i64>,
}

#[derive(Subcommand, Debug)]
pub enum ChiCmd {
    /// Emit numerator l and denominator w as Poly JSON.
    Build {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Evaluate the closed form (and optionally the series) at a point.
    Eval {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        x: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        rho: f64,
        /// Also sum the series through this order.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Closed form against the series oracle at random points.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 0.5)]
        rho_max: f64,
        #[arg(long, default_value_t = 200)]
        order: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Kind {
    T,
    U,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Lattice {
    Box,
    Simplex,
}

#[derive(Subcommand, Debug)]
pub enum KibbleCmd {
    /// Closed form at a point, optionally against the lattice oracle.
    Eval {
        #[arg(long, value_enum, ignore_case = true)]
        kind: Kind,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        x: Vec<f64>,
        /// Correlations as `12=0.6,13=0.8,23=0.9`.
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long, value_enum, default_value_t = Lattice::Box)]
        lattice: Lattice,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Closed form against the lattice oracle for random inputs.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, ignore_case = true, default_value_t = Kind::U)]
        kind: Kind,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 40)]
        cutoff: usize,
        #[arg(long, value_enum, default_value_t = Lattice::Box)]
        lattice: Lattice,
        #[arg(long, default_value_t = 0.3)]
        rho_max: f64,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// The common denominator V_n, symbolic or at given correlations.
    Denominator {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Duality,
    Idb,
    Chi1t,
    D,
    D2,
    FinalIdentity,
    Tn,
    Moments,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conjecture {
    Beta,
    CommonDenominator,
}

#[derive(Subcommand, Debug)]
pub enum QCmd {
    /// Exact or certified identity checks.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Comma-separated rationals, e.g. `1/2,-1/3`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1/3")]
        q: Vec<String>,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
    },
    /// Probes of the open claims; always reports, never fails.
    Probe {
        #[arg(long, value_enum)]
        conjecture: Conjecture,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1/2,1/3,2/5")]
        q: Vec<String>,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
        /// ρ-order for the common-denominator probe.
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Criteria 1–9 (or a subset), one NDJSON line each.
    All {
        /// Case-count override for the random campaigns (criteria 3, 4, 6b).
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
}
