//! `aidlab`: CTM tables, BDM estimates, ECA evolution, rule simplification,
//! perturbation analysis, and the class-separation benchmark from one binary.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error. Every run
//! echoes its fully resolved config to stderr; file outputs are written via
//! rename so they are never partial.

mod commands;
mod support;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use support::Failure;

#[derive(Parser)]
#[command(name = "aidlab", version, about = "algorithmic complexity toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub globals: Globals,
}

#[derive(Args)]
pub struct Globals {
    /// Seed for seeded operations; each command documents its default
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; never changes output bytes
    #[arg(long, global = true, env = "ALGORAND_LAB_THREADS")]
    pub threads: Option<usize>,
    /// Write here (atomically) instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format where a command supports more than one
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

impl Globals {
    pub fn threads(&self) -> usize {
        self.threads.unwrap_or(1).max(1)
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Pbm,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum Init {
    /// one centered 1 on a zero row
    Single,
    /// seeded uniform random row
    Random,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum Fallback {
    /// missing blocks are an error
    Error,
    /// missing blocks cost one bit more than the costliest table entry
    MaxPlusOne,
}

#[derive(Subcommand)]
pub enum Command {
    /// Elementary cellular automata
    #[command(subcommand)]
    Eca(EcaCmd),
    /// Exhaustive Turing-machine output frequency tables
    #[command(subcommand)]
    Ctm(CtmCmd),
    /// Block decomposition complexity of a bit string or PBM grid
    Bdm(BdmArgs),
    /// Perturbation calculus on PBM grids
    #[command(subcommand)]
    Aid(AidCmd),
    /// The 256-rule class-separation benchmark
    #[command(subcommand)]
    Bench(BenchCmd),
}

#[derive(Subcommand)]
pub enum EcaCmd {
    /// Evolve one rule from an initial row (PBM or CSV grid)
    Evolve(EvolveArgs),
    /// Minimal wildcard-icon covers and their sizes
    Simplify(SimplifyArgs),
    /// Langton's lambda for all rules
    Lambda(LambdaArgs),
    /// Two rules sharing one tape, split at a boundary (PBM or CSV grid)
    Interact(InteractArgs),
}

#[derive(Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub rule: u8,
    #[arg(long, default_value_t = 100)]
    pub width: usize,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Init::Single)]
    pub init: Init,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("which").required(true)))]
pub struct SimplifyArgs {
    #[arg(long, group = "which")]
    pub rule: Option<u8>,
    #[arg(long, group = "which")]
    pub all: bool,
}

#[derive(Args)]
pub struct LambdaArgs {
    /// all 256 rules, one line each
    #[arg(long, required = true)]
    pub all: bool,
}

#[derive(Args)]
pub struct InteractArgs {
    #[arg(long)]
    pub rule_a: u8,
    #[arg(long)]
    pub rule_b: u8,
    /// cells left of this index follow rule A
    #[arg(long)]
    pub split: usize,
    #[arg(long, default_value_t = 100)]
    pub width: usize,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Init::Single)]
    pub init: Init,
}

#[derive(Subcommand)]
pub enum CtmCmd {
    /// Enumerate a machine space (or a range or sample of it) into a table
    Build(BuildArgs),
    /// Merge tables built over disjoint index ranges
    Merge(MergeArgs),
    /// Look up the CTM value of an output string
    Query(QueryArgs),
}

#[derive(Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub states: u32,
    /// Step cutoff; defaults to the certified bound + 1 where known
    #[arg(long)]
    pub cutoff: Option<u64>,
    /// Machine index range "lo..hi" (end exclusive)
    #[arg(long, value_parser = parse_range, conflicts_with = "sample")]
    pub range: Option<(u64, u64)>,
    /// Run N seeded random machines instead of the full space
    #[arg(long)]
    pub sample: Option<u64>,
}

#[derive(Args)]
pub struct MergeArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub string: String,
}

#[derive(Args)]
pub struct BdmArgs {
    #[arg(long)]
    pub table: PathBuf,
    /// Literal bits, or a path to a PBM grid or bits file
    #[arg(long)]
    pub input: String,
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = Fallback::MaxPlusOne)]
    pub fallback: Fallback,
}

#[derive(Subcommand)]
pub enum AidCmd {
    /// Information delta and classification of one perturbation
    Delta(DeltaArgs),
    /// Per-row perturbation impacts
    Profile(ProfileArgs),
    /// Rows ordered most-disruptive-first
    Order(ProfileArgs),
}

#[derive(Args)]
pub struct DeltaArgs {
    #[arg(long)]
    pub table: PathBuf,
    /// PBM grid to perturb
    #[arg(long)]
    pub grid: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = Fallback::MaxPlusOne)]
    pub fallback: Fallback,
    /// Cell "row,col" to flip; repeatable
    #[arg(long = "flip", value_parser = parse_cell, conflicts_with_all = ["replace_row", "row"])]
    pub flips: Vec<(usize, usize)>,
    /// Replace this row with --row
    #[arg(long, requires = "row")]
    pub replace_row: Option<usize>,
    /// Replacement row bits for --replace-row
    #[arg(long, requires = "replace_row")]
    pub row: Option<String>,
}

#[derive(Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub table: PathBuf,
    /// PBM grid whose rows are perturbed
    #[arg(long)]
    pub grid: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = Fallback::MaxPlusOne)]
    pub fallback: Fallback,
    #[arg(long, value_enum, default_value_t = Mode::FlipAll)]
    pub mode: Mode,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum Mode {
    /// complement the whole row
    FlipAll,
    /// substitute a seeded random row
    ReplaceRandom,
}

#[derive(Subcommand)]
pub enum BenchCmd {
    /// Score all 256 rules on one shared evolution
    Run(RunArgs),
    /// Per-class summary of a results CSV
    Stats(StatsArgs),
}

#[derive(Args)]
pub struct RunArgs {
    #[arg(long)]
    pub table: PathBuf,
    /// Wolfram class CSV; defaults to the shipped classification
    #[arg(long)]
    pub classes: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub width: usize,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Defaults to the recorded reference config (seed 7 when --seed absent)
    #[arg(long, value_enum, default_value_t = Init::Random)]
    pub init: Init,
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = Fallback::MaxPlusOne)]
    pub fallback: Fallback,
}

#[derive(Args)]
pub struct StatsArgs {
    /// Results CSV from `bench run`
    #[arg(long)]
    pub input: PathBuf,
    /// lambda, simplified_bits, lzw_bits, entropy, or bdm
    #[arg(long)]
    pub measure: String,
}

fn parse_range(text: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = text.split_once("..").ok_or("expected lo..hi")?;
    let lo: u64 = lo.parse().map_err(|_| "expected lo..hi with integer bounds")?;
    let hi: u64 = hi.parse().map_err(|_| "expected lo..hi with integer bounds")?;
    if lo > hi {
        return Err("range start exceeds end".into());
    }
    Ok((lo, hi))
}

fn parse_cell(text: &str) -> Result<(usize, usize), String> {
    let (r, c) = text.split_once(',').ok_or("expected row,col")?;
    let r: usize = r.parse().map_err(|_| "expected row,col with integer parts")?;
    let c: usize = c.parse().map_err(|_| "expected row,col with integer parts")?;
    Ok((r, c))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
