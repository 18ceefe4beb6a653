use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qident_core::{Mode, DEFAULT_DIM_CAP};

#[derive(Debug, Parser)]
#[command(name = "qident", version, about = "Optimal identification of Haar-random pure states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Largest Hilbert-space dimension any dense build may reach.
    #[arg(long, env = "QIDENT_CAP", default_value_t = DEFAULT_DIM_CAP, global = true)]
    pub cap: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form success probability and its diagram terms.
    Exact(Size),
    /// Spectrum of the identification operator against the predicted table.
    Spectrum(SpectrumArgs),
    /// Optimal two-outcome measurement built from the dense operator.
    Povm(McopySize),
    /// Monte Carlo estimate of the mean success probability.
    Simulate(SimulateArgs),
    /// Success probability with several copies of the input state.
    Mcopy(McopySize),
    /// Closed-form table over N = 1..=N_max for each local dimension.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct Size {
    /// Copies of each reference state.
    #[arg(long = "N", value_name = "N")]
    pub copies: usize,
    /// Local dimension.
    #[arg(long = "d", value_name = "d")]
    pub d: usize,
}

#[derive(Debug, Args)]
pub struct McopySize {
    /// Copies of the input state.
    #[arg(long = "M", value_name = "M", default_value_t = 1)]
    pub inputs: usize,
    #[command(flatten)]
    pub size: Size,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub size: Size,
    /// Diagonalize on the full tensor space instead of the symmetric subspace.
    #[arg(long)]
    pub full: bool,
    /// Write the full-space operator to this file.
    #[arg(long = "dump", value_name = "PATH")]
    pub dump_path: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub size: McopySize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Conditional)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long = "N-max", value_name = "N_MAX")]
    pub n_max: usize,
    /// Comma-separated local dimensions.
    #[arg(long = "d", value_name = "d", value_delimiter = ',', num_args = 1.., required = true)]
    pub dims: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Conditional,
    Outcome,
}

impl ModeArg {
    pub fn name(self) -> &'static str {
        match self {
            ModeArg::Conditional => "conditional",
            ModeArg::Outcome => "outcome",
        }
    }
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Conditional => Mode::Conditional,
            ModeArg::Outcome => Mode::Outcome,
        }
    }
}

/// Range checks on every numeric flag, run before any computation.
pub fn validate(cli: &Cli) -> Result<(), String> {
    fn at_least(name: &str, value: usize, min: usize) -> Result<(), String> {
        if value < min {
            return Err(format!("--{name} must be at least {min}, got {value}"));
        }
        Ok(())
    }
    fn size(s: &Size) -> Result<(), String> {
        at_least("N", s.copies, 1)?;
        at_least("d", s.d, 2)
    }
    at_least("cap", cli.cap, 1)?;
    match &cli.command {
        Command::Exact(s) => size(s),
        Command::Spectrum(a) => size(&a.size),
        Command::Povm(m) | Command::Mcopy(m) => {
            at_least("M", m.inputs, 1)?;
            size(&m.size)
        }
        Command::Simulate(a) => {
            at_least("M", a.size.inputs, 1)?;
            size(&a.size.size)?;
            if a.trials < 100 {
                return Err(format!("--trials must be at least 100, got {}", a.trials));
            }
            if a.workers == 0 || a.workers as u64 > a.trials {
                return Err(format!("--workers must be in 1..={}, got {}", a.trials, a.workers));
            }
            Ok(())
        }
        Command::Sweep(a) => {
            at_least("N-max", a.n_max, 1)?;
            a.dims.iter().try_for_each(|&d| at_least("d", d, 2))
        }
    }
}
