use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use progset::constructions::enumerate::RationalOrder;
use progset::constructions::DensityTarget;
use progset::Rational;

/// Rationals are accepted only as `p/q` or integers.
pub fn parse_q(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e: progset::Error| e.to_string())
}

#[derive(Parser, Debug, Clone)]
#[command(name = "progset", version, about = "Progression-avoiding sets: constructions, profiles, series and witnesses")]
pub struct Cli {
    /// Working precision in bits for transcendental enclosures (also the escalation cap).
    #[arg(long, global = true, env = "PROGSET_PRECISION_BITS", default_value_t = 256)]
    pub precision_bits: u32,
    /// Seed for sampled grids.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; a run manifest is written next to it. Without it, output goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Build a construction and write its removed batches.
    Construct(ConstructArgs),
    /// Window or density profile of a written construction, as CSV.
    Profile(ProfileArgs),
    /// Series criteria, as CSV.
    Series(SeriesArgs),
    /// Search for a progression witness.
    Find(FindArgs),
    /// Check a witness, a construction's certificates, or a run manifest.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Construct(_) => "construct",
            Command::Profile(_) => "profile",
            Command::Series(_) => "series",
            Command::Find(_) => "find",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Equidistribute,
    Elim,
    Bradford,
    Theorem13,
    Theorem11,
    Monster,
    Cantor,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    SternBrocot,
    Height,
}

impl From<Order> for RationalOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::SternBrocot => RationalOrder::SternBrocot,
            Order::Height => RationalOrder::Height,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Stepwise,
    Loglog,
}

impl From<Target> for DensityTarget {
    fn from(t: Target) -> Self {
        match t {
            Target::Stepwise => DensityTarget::Stepwise,
            Target::Loglog => DensityTarget::LogLog,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    #[arg(long, value_parser = parse_q)]
    pub epsilon: Option<Rational>,
    /// Middle-`a` Cantor parameter.
    #[arg(long, value_parser = parse_q)]
    pub a: Option<Rational>,
    /// Explicit Cantor removal lengths `t_0,t_1,...`.
    #[arg(long, value_parser = parse_q, value_delimiter = ',')]
    pub t: Vec<Rational>,
    /// Number of batches (levels for theorem13/theorem11/monster).
    #[arg(long)]
    pub depth: Option<u64>,
    /// Alias of `--depth`.
    #[arg(long, conflicts_with = "depth")]
    pub horizon: Option<u64>,
    /// Explicit differences, reused cyclically; otherwise all positive rationals are enumerated.
    #[arg(long, value_parser = parse_q, value_delimiter = ',')]
    pub deltas: Vec<Rational>,
    /// Use only the first `count` enumerated rationals, cyclically.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum, default_value_t = Order::SternBrocot)]
    pub order: Order,
    #[arg(long, value_enum, default_value_t = Target::Stepwise)]
    pub target: Target,
    /// Largest scale materialized interval by interval (monster).
    #[arg(long, default_value_t = 1 << 16)]
    pub cap: u64,
    /// Where the glued set stops being used (theorem11).
    #[arg(long, value_parser = parse_q, default_value = "40")]
    pub cutoff: Rational,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileMode {
    Window,
    Density,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Grid `lo:step:hi` (inclusive).
    #[arg(long)]
    pub grid: Option<String>,
    /// Explicit grid points.
    #[arg(long, value_parser = parse_q, value_delimiter = ',')]
    pub t: Vec<Rational>,
    /// Additional points drawn with `--seed` from the grid's range, on a 2^-16 lattice.
    #[arg(long, default_value_t = 0)]
    pub sample: usize,
}

#[derive(Args, Debug, Clone)]
pub struct ProfileArgs {
    /// Construction JSON written by `construct`.
    pub set: PathBuf,
    #[arg(long, value_enum, default_value_t = ProfileMode::Window)]
    pub mode: ProfileMode,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_parser = parse_q, default_value = "0")]
    pub center: Rational,
    #[arg(long)]
    pub one_sided: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Prop31,
    Lemma42,
    Cor44,
}

#[derive(Args, Debug, Clone)]
pub struct SeriesArgs {
    #[arg(value_enum)]
    pub criterion: Criterion,
    /// Construction JSON (prop31, lemma42).
    #[arg(long)]
    pub set: Option<PathBuf>,
    #[arg(long, value_parser = parse_q, default_value = "1")]
    pub r0: Rational,
    /// Number of terms (prop31).
    #[arg(long, default_value_t = 20)]
    pub n: u32,
    /// Middle-`a` Cantor parameter (cor44).
    #[arg(long, value_parser = parse_q)]
    pub a: Option<Rational>,
    /// Explicit removal lengths (cor44).
    #[arg(long, value_parser = parse_q, value_delimiter = ',')]
    pub t: Vec<Rational>,
    /// Declared bound on `Σ 2^k t_k` past the listed lengths.
    #[arg(long, value_parser = parse_q)]
    pub tail: Option<Rational>,
    /// Declared bound on `Σ k 2^k t_k` past the listed lengths.
    #[arg(long, value_parser = parse_q)]
    pub weighted_tail: Option<Rational>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FindTarget {
    Ap,
    Gp,
}

#[derive(Args, Debug, Clone)]
pub struct FindArgs {
    #[arg(value_enum)]
    pub target: FindTarget,
    /// Construction JSON whose removed set is avoided (ap).
    #[arg(long)]
    pub set: Option<PathBuf>,
    #[arg(long, value_parser = parse_q)]
    pub delta: Option<Rational>,
    /// Terms to certify (ap).
    #[arg(long, default_value_t = 30)]
    pub terms: u64,
    /// Middle-`a` Cantor parameter (gp).
    #[arg(long, value_parser = parse_q)]
    pub a: Option<Rational>,
    /// Explicit removal lengths (gp).
    #[arg(long, value_parser = parse_q, value_delimiter = ',')]
    pub t: Vec<Rational>,
    #[arg(long, value_parser = parse_q)]
    pub tail: Option<Rational>,
    #[arg(long, value_parser = parse_q)]
    pub weighted_tail: Option<Rational>,
    #[arg(long, value_parser = parse_q)]
    pub q: Option<Rational>,
    #[arg(long, default_value_t = 12)]
    pub cantor_depth: usize,
    #[arg(long, default_value_t = 30)]
    pub ap_depth: u64,
}

#[derive(Args, Debug, Clone)]
pub struct ReplayArgs {
    pub path: PathBuf,
}
