use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 20_240_157;

#[derive(Debug, Clone, Parser)]
#[command(name = "iwasawa", version, about = "Iwasawa invariants, Kida's formula and pseudo-nullity checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// Starting level `n` of the Stickelberger approximation.
    #[arg(long, global = true, default_value_t = 2)]
    pub precision_level: u32,
    /// Starting coefficient precision `m` (work modulo `p^m`).
    #[arg(long, global = true, default_value_t = 2)]
    pub precision_mod: u32,
    /// Truncation degree of power series.
    #[arg(long, global = true, default_value_t = 16)]
    pub degree_cap: usize,
    /// Worker threads; results never depend on it.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub workers: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Emit the JSON report instead of a table.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub json: bool,
    /// Allow network access for curve data.
    #[arg(long, global = true)]
    pub network: bool,
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Irregular indices `k` with `p | B_k`.
    Irregular { p: u64 },
    /// Minus-part `lambda` and `mu` for every odd prime up to `--max`.
    Scan {
        #[arg(long)]
        max: u64,
    },
    /// Kida's formula on a tower data file.
    Kida {
        #[arg(long)]
        input: PathBuf,
    },
    /// `Lambda(G)`-rank of the minus class group.
    Rank(RankArgs),
    /// `Lambda(G)`-rank of a Selmer group dual.
    Selmer(SelmerArgs),
    /// Brute-force lemma checks on finite modules.
    Lab(LabArgs),
    /// Index and rank growth in uniform groups.
    Growth(GrowthArgs),
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct Assume {
    /// Assert `mu = 0` where it cannot be computed.
    #[arg(long)]
    pub assume_mu_zero: bool,
    #[arg(long)]
    pub assume_strongly_admissible: bool,
    #[arg(long)]
    pub assume_good_ordinary: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RankArgs {
    /// Tower data file.
    #[arg(long, conflicts_with_all = ["cyclotomic", "lambda"])]
    pub input: Option<PathBuf>,
    /// Run the pipeline for `Q(mu_p)` from computed minus invariants.
    #[arg(long, conflicts_with = "lambda")]
    pub cyclotomic: Option<u64>,
    /// Raw `lambda_K`; needs `--delta` and `--q-size`.
    #[arg(long, requires_all = ["delta", "q_size"])]
    pub lambda: Option<u64>,
    #[arg(long)]
    pub delta: Option<u8>,
    #[arg(long)]
    pub q_size: Option<usize>,
    #[command(flatten)]
    pub assume: Assume,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelmerArgs {
    /// Elliptic local data file.
    #[arg(long, conflicts_with = "label")]
    pub input: Option<PathBuf>,
    /// Curve label to fetch (cache first, then network when enabled).
    #[arg(long, requires = "p")]
    pub label: Option<String>,
    #[arg(long)]
    pub p: Option<u64>,
    /// Primes of `K` ramified in `L`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub ramified: Vec<u64>,
    /// Primes with `E(K_v)[p] != 0`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub torsion: Vec<u64>,
    /// `Z_p`-corank of the Selmer group over `K`.
    #[arg(long, default_value_t = 0)]
    pub corank: u64,
    #[command(flatten)]
    pub assume: Assume,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    /// `h = 1` on random finite modules with trivial `p`-torsion action.
    Fptrivial,
    /// `h = 1` on random finite modules of larger exponent.
    Herbrand,
    Basiclemma,
    Mptrivial,
    /// Herbrand quotient of the truncated remark module.
    #[value(alias = "mptrivial-remark")]
    Remark,
    /// Order accounting on six-term sequences.
    Psi,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LabArgs {
    pub lemma: Lemma,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 3)]
    pub p: u64,
    /// Largest number of cyclic factors in random modules.
    #[arg(long, default_value_t = 6)]
    pub max_dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthKind {
    Abelian,
    Heisenberg,
    Gv,
    Howson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupChoice {
    Abelian,
    Heisenberg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GrowthArgs {
    pub kind: GrowthKind,
    #[arg(long, default_value_t = 3)]
    pub p: u64,
    /// Top level `N`; tables run over `n <= N`. Defaults to 5, or 3 for `howson`.
    #[arg(long)]
    pub levels: Option<u32>,
    /// Dimension of the abelian group.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Ambient group for `gv`.
    #[arg(long, value_enum, default_value_t = GroupChoice::Abelian)]
    pub group: GroupChoice,
    /// Generators of `H`, e.g. `1,0;0,3`.
    #[arg(long)]
    pub gens: Option<String>,
    /// Group-ring presentation file for `howson`.
    #[arg(long)]
    pub input: Option<PathBuf>,
}
