//! Command-line arguments. Every subcommand's arguments serialize into the
//! report's `config_echo`.

use std::path::PathBuf;

use addcomb::direct::Theorem;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "addcomb", version, about = "Finite-scale additive combinatorics experiments")]
pub struct Cli {
    /// Report destination; defaults to `$ADDCOMB_OUT_DIR/<subcommand>.<ext>`,
    /// or stdout when the variable is unset.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (default: logical cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for every random choice the command makes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// A + B in Z/Q.
    Sumset(PairArgs),
    /// The δ-popular sumset and the representation counts.
    Popular(PopularArgs),
    /// Checks a direct theorem over all, random or listed pairs.
    DirectSweep(DirectSweepArgs),
    /// Finds or verifies an inverse-structure certificate.
    InverseDetect(InverseArgs),
    /// Verifies or searches for a popular-sumset cover (A', B').
    PopularCover(CoverArgs),
    /// Discrepancy of nθ, n = 1..N, with the Erdős–Turán bound.
    Discrepancy(DiscrepancyArgs),
    /// Bohr set {n : nθ ∈ I} on a range, with optional window profile.
    Bohr(BohrArgs),
    /// First m in [(x-ε)H, (x+ε)H] with every ‖mα_i‖ <= ε.
    AlmostPeriod(AlmostPeriodArgs),
    /// Gowers norms on Z/Q or on an interval.
    Gowers(GowersArgs),
    /// Intermediate-scale U¹/U² estimates and the local ergodicity statistic.
    ScaleNorm(ScaleNormArgs),
    /// Structured plus pseudorandom decomposition of a [0, 1]-valued signal.
    Regularity(RegularityArgs),
    /// Density profile of a subset of the naturals.
    Density(DensityArgs),
    /// Schnirelmann density, union inequality and subinterval finder.
    Schnirelmann(SchnirelmannArgs),
    /// Builds one of the example sets.
    Construct(ConstructArgs),
    /// Re-runs every counterexample recorded in a report.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sumset(_) => "sumset",
            Command::Popular(_) => "popular",
            Command::DirectSweep(_) => "direct-sweep",
            Command::InverseDetect(_) => "inverse-detect",
            Command::PopularCover(_) => "popular-cover",
            Command::Discrepancy(_) => "discrepancy",
            Command::Bohr(_) => "bohr",
            Command::AlmostPeriod(_) => "almost-period",
            Command::Gowers(_) => "gowers",
            Command::ScaleNorm(_) => "scale-norm",
            Command::Regularity(_) => "regularity",
            Command::Density(_) => "density",
            Command::Schnirelmann(_) => "schnirelmann",
            Command::Construct(_) => "construct",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PairArgs {
    /// Set file: {"Q": .., "elements": [..]} or "Q=<int>" then one member per line.
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PopularArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sets: PairArgs,
    #[arg(long)]
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremArg {
    CauchyDavenport,
    Vosper,
    Kneser,
    KneserIdentity,
}

impl From<TheoremArg> for Theorem {
    fn from(t: TheoremArg) -> Theorem {
        match t {
            TheoremArg::CauchyDavenport => Theorem::CauchyDavenport,
            TheoremArg::Vosper => Theorem::Vosper,
            TheoremArg::Kneser => Theorem::Kneser,
            TheoremArg::KneserIdentity => Theorem::KneserIdentity,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DirectSweepArgs {
    #[arg(long, value_enum)]
    pub theorem: TheoremArg,
    /// Modulus (prime for Cauchy–Davenport and Vosper).
    #[arg(long, alias = "q")]
    pub p: Option<usize>,
    /// Kneser tolerance; the coset hypothesis uses index <= ceil(1/ε).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Every ordered pair of nonempty subsets.
    #[arg(long, conflicts_with_all = ["random", "pairs"])]
    pub exhaustive: bool,
    /// This many random pairs.
    #[arg(long, conflicts_with = "pairs")]
    pub random: Option<usize>,
    /// JSON array of pair instances {theorem, modulus, a, b, eps}.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Checks the conclusion on every pair, ignoring the hypothesis.
    #[arg(long)]
    pub unconditional: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct InverseArgs {
    /// JSON {"A": set, "B": set}.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long = "D", default_value_t = 4)]
    #[serde(rename = "D")]
    pub max_index: usize,
    /// Margin for case (i).
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Verify this certificate instead of detecting one.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CoverArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sets: PairArgs,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub eps: f64,
    /// Candidate A' ⊆ A to verify; with --b2. Without them a search runs.
    #[arg(long, requires = "b2")]
    pub a2: Option<PathBuf>,
    #[arg(long, requires = "a2")]
    pub b2: Option<PathBuf>,
    /// Candidate budget for the exhaustive search.
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct DiscrepancyArgs {
    /// `p/q` for an exact rational, otherwise a decimal.
    #[arg(long)]
    pub theta: String,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
    /// Frequency cutoff for the Erdős–Turán bound.
    #[arg(long, default_value_t = 100)]
    pub et_cutoff: u64,
    #[arg(long, default_value_t = 10.0)]
    pub c0: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct BohrArgs {
    #[arg(long)]
    pub theta: String,
    /// `LEFT,LENGTH` (decimals) or `a/q,b/q` for the rational arc [a/q, b/q).
    #[arg(long)]
    pub interval: String,
    /// Closed arc instead of half-open (decimal form only).
    #[arg(long)]
    pub closed: bool,
    /// `LO,HI` for the integers LO <= n < HI.
    #[arg(long)]
    pub range: String,
    /// Window length M for the (x, window density) profile.
    #[arg(long)]
    pub window: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct AlmostPeriodArgs {
    /// Comma-separated frequencies (`p/q` or decimals).
    #[arg(long)]
    pub alphas: String,
    #[arg(long = "H")]
    #[serde(rename = "H")]
    pub h: u64,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub eps: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct GowersArgs {
    /// JSON array of reals or [re, im] pairs, or {"offset", "values"}.
    #[arg(long)]
    pub signal: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// Group size for the cyclic norm; the signal is zero-padded to Q.
    #[arg(long = "Q", conflicts_with = "interval")]
    #[serde(rename = "Q")]
    pub q: Option<usize>,
    /// Norm on the interval carrying the signal instead of on Z/Q.
    #[arg(long)]
    pub interval: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ScaleNormArgs {
    #[arg(long)]
    pub signal: PathBuf,
    /// Comma-separated scale lengths N_s.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: String,
    /// Comma-separated window lengths H_s, one per N_s.
    #[arg(long = "H")]
    #[serde(rename = "H")]
    pub h: String,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct RegularityArgs {
    #[arg(long)]
    pub signal: PathBuf,
    #[arg(long)]
    pub eps: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    /// Integers (JSON array, {"elements": [..]}, a construct output, or text).
    #[arg(long)]
    pub set: PathBuf,
    /// Which set of a construct output to read.
    #[arg(long, default_value = "A")]
    pub which: String,
    /// Comma-separated increasing checkpoints.
    #[arg(long)]
    pub checkpoints: String,
}

#[derive(Debug, Args, Serialize)]
pub struct SchnirelmannArgs {
    #[arg(long)]
    pub set: PathBuf,
    #[arg(long, default_value = "A")]
    pub which: String,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
    /// Second set for the union inequality |A ∪ (A+B)| >= α + β(1-α).
    #[arg(long)]
    pub union_with: Option<PathBuf>,
    /// Runs the subinterval finder with this δ (requires --eps).
    #[arg(long, requires = "eps")]
    pub delta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructKind {
    Coinflip,
    Ctmn,
    TwoScale,
    BohrLift,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub kind: ConstructKind,
    /// Parameter file; presets are used when omitted.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub bound: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    /// A report produced by this tool.
    #[arg(long)]
    pub input: PathBuf,
}
