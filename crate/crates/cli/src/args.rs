use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polscat::{Beams, Mixing};

pub const WORKERS_ENV: &str = "POLSCAT_WORKERS";

/// Entangled photon pairs after random scattering: ensemble averages of
/// concurrence and CHSH-inferred pseudo-concurrence.
#[derive(Debug, Parser)]
#[command(name = "polscat", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one state and print rho, C, E and C' as JSON.
    Measure(MeasureArgs),
    /// Monte Carlo averages over a range of mode counts, as CSV.
    Sweep(SweepArgs),
    /// Fit an exponential or algebraic decay to a sweep table.
    Fit(FitArgs),
    /// Solve for the decay constants A and B.
    Constants,
    /// Analytic large-N predictions per scenario class, as CSV.
    Reference(ReferenceArgs),
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum BeamsArg {
    /// Both photons scattered.
    #[default]
    Both,
    /// One photon scattered, the other detected in its original mode.
    Single,
}

impl From<BeamsArg> for Beams {
    fn from(b: BeamsArg) -> Self {
        match b {
            BeamsArg::Both => Beams::Both,
            BeamsArg::Single => Beams::Single,
        }
    }
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Polarization-mixing disorder (default).
    #[arg(long, conflicts_with = "conserving")]
    pub mixing: bool,
    /// Polarization-conserving disorder.
    #[arg(long)]
    pub conserving: bool,
    /// Which photons are scattered.
    #[arg(long, value_enum, default_value_t = BeamsArg::Both)]
    pub beams: BeamsArg,
}

impl ScenarioArgs {
    pub fn mixing(&self) -> Mixing {
        if self.conserving {
            Mixing::PolarizationConserving
        } else {
            Mixing::PolarizationMixing
        }
    }
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Detected modes per beam (N1 = N2 = N).
    #[arg(long, default_value_t = 1, conflicts_with_all = ["n1", "n2"])]
    pub n: usize,
    /// Detected modes of the first beam; requires --n2.
    #[arg(long, requires = "n2")]
    pub n1: Option<usize>,
    /// Detected modes of the second beam; requires --n1.
    #[arg(long, requires = "n1")]
    pub n2: Option<usize>,
    /// Seed of the random stream.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Inclusive range of mode counts, `A..B`.
    #[arg(long, conflicts_with = "n")]
    pub n_range: Option<String>,
    /// Explicit comma-separated mode counts.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Samples per mode count.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Master seed; each row derives its own seed from it and N.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on it [default: all cores].
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// CSV output path [default: stdout]. The run configuration is written
    /// next to it with a `.json` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum ModelArg {
    /// mean = amplitude * exp(rate * N)
    #[default]
    Exponential,
    /// mean = amplitude * N^power
    Algebraic,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum MeasureColumn {
    /// mean_C / stderr_C
    #[default]
    Concurrence,
    /// mean_Cp / stderr_Cp
    PseudoConcurrence,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Sweep table to fit.
    pub table: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelArg::Exponential)]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value_t = MeasureColumn::Concurrence)]
    pub measure: MeasureColumn,
}

#[derive(Debug, Args)]
pub struct ReferenceArgs {
    /// Inclusive range of mode counts, `A..B`.
    #[arg(long, conflicts_with = "n")]
    pub n_range: Option<String>,
    /// Explicit comma-separated mode counts.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// CSV output path [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}
