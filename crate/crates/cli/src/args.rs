use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "fixpoint-cc",
    version,
    about = "Fixed-point and Sperner communication problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an instance file.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run a protocol on an instance and print a report.
    Solve(SolveArgs),
    /// Reduce an instance (or the target of a reduction record) to another kind.
    Reduce(ReduceArgs),
    /// Map a target solution back through a reduction record.
    Backmap(BackmapArgs),
    /// Check an instance or a claimed solution with the referee.
    Verify(VerifyArgs),
    /// Sweep resolutions and print CSV.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Comp,
    Concat,
    Mean,
    Local,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// A random Brouwer instance.
    Brouwer(GenBrouwerArgs),
    /// A random valid Sperner coloring, or one embedding a comp instance.
    Sperner(GenSpernerArgs),
}

#[derive(Debug, Args)]
pub struct GenBrouwerArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Cube dimension.
    #[arg(long)]
    pub n: usize,
    /// Dimension of B's side for comp instances (defaults to n).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// B's Lipschitz bound (defaults to --lambda).
    #[arg(long)]
    pub lambda_b: Option<f64>,
    /// Norm exponent, or "inf".
    #[arg(long, default_value = "inf")]
    pub p: String,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    /// Anchor points per random map.
    #[arg(long, default_value_t = 8)]
    pub anchors: usize,
    /// Input bits per player for local instances.
    #[arg(long, default_value_t = 8)]
    pub big_n: usize,
    /// Locality for local instances.
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    /// Regions of the selector for local instances.
    #[arg(long, default_value_t = 1)]
    pub regions: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenSpernerArgs {
    #[arg(long, required_unless_present = "from")]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: u32,
    /// Number of color classes held by A.
    #[arg(long, required_unless_present = "from")]
    pub t: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Embed a comp instance with n = m = 1 instead of drawing colors.
    #[arg(long)]
    pub from: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Grid,
    Surplus,
    Single,
    ThreePlayer,
    Nash,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    /// Defaults by file type: grid, surplus (or single when A holds d
    /// classes), nash.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Grid spacing; defaults to the coarsest grid in the total regime.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Bits per quantized coordinate.
    #[arg(long, default_value_t = 16)]
    pub bits: u32,
    /// Regret threshold for nash.
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
    /// Write the full transcript here.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Include wall time in the report (makes reports differ between runs).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Comp,
    Concat,
    Mean,
    Nash,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// A Brouwer instance or a reduction record.
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub to: TargetArg,
    /// Dimension ratio bound for comp to concat (defaults to max(n/m, m/n)).
    #[arg(long)]
    pub c: Option<f64>,
    /// Grid spacing for nash games.
    #[arg(long, default_value_t = 0.125)]
    pub alpha: f64,
    /// Target instance (or game) file.
    #[arg(long)]
    pub out: PathBuf,
    /// Reduction record file.
    #[arg(long)]
    pub backmap: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BackmapArgs {
    pub record: PathBuf,
    /// A solve report whose solution is a point.
    #[arg(long, conflicts_with = "point", required_unless_present = "point")]
    pub report: Option<PathBuf>,
    /// Comma-separated coordinates.
    #[arg(long)]
    pub point: Option<String>,
    /// Target epsilon the point was found at (defaults to the target's).
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    #[arg(long, conflicts_with = "point")]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Surplus protocol cost over random colorings.
    Sperner(BenchSpernerArgs),
    /// Grid protocol cost over a range of spacings.
    Brouwer(BenchBrouwerArgs),
}

#[derive(Debug, Args)]
pub struct BenchSpernerArgs {
    #[arg(long)]
    pub d: usize,
    /// Comma-separated resolutions.
    #[arg(long, value_delimiter = ',', default_values_t = [4u32, 8, 16, 32])]
    pub ks: Vec<u32>,
    #[arg(long, default_value_t = 10)]
    pub instances: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchBrouwerArgs {
    pub instance: PathBuf,
    /// Comma-separated grid steps per axis.
    #[arg(long, value_delimiter = ',', default_values_t = [2u32, 4, 8, 16])]
    pub steps: Vec<u32>,
    #[arg(long, default_value_t = 16)]
    pub bits: u32,
}
