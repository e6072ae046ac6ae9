use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rookstat_core::{Kind, Model};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "rookstat",
    version,
    about = "Rook placements, Stirling numbers and spectrum approximations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Enumeration cap on n for exhaustive structure enumeration.
    #[arg(long, global = true, env = "ROOKSTAT_CAP")]
    pub cap: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact Stirling number.
    Stirling {
        #[arg(long)]
        kind: KindArg,
        #[command(flatten)]
        size: SizeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Chen-Stein quantities and every Stirling bound at one (n, r).
    Bounds {
        #[command(flatten)]
        size: SizeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bound-versus-exact table over a range of k.
    Compare {
        #[arg(long)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k_min: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Empirical spectrum law by rejection sampling.
    Sample {
        #[arg(long)]
        model: ModelArg,
        #[command(flatten)]
        size: SizeArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 4)]
        shards: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact total variation between the spectrum law and its approximation.
    Tv {
        #[arg(long)]
        model: ModelArg,
        #[command(flatten)]
        size: SizeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Decode a rook placement such as `6;(1,3),(3,6)`.
    Decode {
        #[arg(long)]
        model: ModelArg,
        #[arg(long)]
        placement: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Encode a partition (`1 3 6|2|4|5`) or permutation (`(1 3 2)(4)`).
    Encode {
        #[arg(long)]
        model: ModelArg,
        #[arg(long)]
        structure: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the invariant suite and report pass/fail per property.
    Verify {
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SizeArgs {
    #[arg(long)]
    pub n: usize,
    /// Number of blocks or cycles.
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of rooks, `n - k`.
    #[arg(long)]
    pub r: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ModelArg {
    Partition,
    Permutation,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum KindArg {
    First,
    Second,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Partition => Model::Partition,
            ModelArg::Permutation => Model::Permutation,
        }
    }
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::First => Kind::First,
            KindArg::Second => Kind::Second,
        }
    }
}

/// Validated `(n, k, r)` with `r = n - k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Size {
    pub n: usize,
    pub k: usize,
    pub r: usize,
}

impl Size {
    /// `t = r / sqrt(n)`, displayed only.
    pub fn t(&self) -> f64 {
        self.r as f64 / (self.n as f64).sqrt()
    }
}

impl SizeArgs {
    /// Exactly one of `k`, `r`; both must lie in `0..=n`.
    pub fn resolve(&self) -> Result<Size, CliError> {
        let n = self.n;
        match (self.k, self.r) {
            (Some(_), Some(_)) => Err(CliError::config("k", "give exactly one of --k and --r")),
            (None, None) => Err(CliError::config("k", "one of --k or --r is required")),
            (Some(k), None) if k > n => Err(CliError::config("k", format!("k = {k} exceeds n = {n}"))),
            (None, Some(r)) if r > n => Err(CliError::config("r", format!("r = {r} exceeds n = {n}"))),
            (Some(k), None) => Ok(Size { n, k, r: n - k }),
            (None, Some(r)) => Ok(Size { n, k: n - r, r }),
        }
    }
}

impl OutputArgs {
    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}
