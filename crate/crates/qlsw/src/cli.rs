//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::{self, Settings};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "qlsw",
    version,
    about = "Simulate a two-qubit HHL linear-system solver and its photonic realisation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    General,
    Optimized,
}

#[derive(Debug, clap::Args)]
pub struct SamplingArgs {
    /// RNG seed [default: QLSW_SEED, then the noise file, then 1]
    #[arg(long, env = "QLSW_SEED")]
    pub seed: Option<u64>,
    /// Mean counts per analysis basis [default: noise file, then 10000]
    #[arg(long)]
    pub shots: Option<u64>,
    /// Monte-Carlo resamplings for error bars
    #[arg(long, default_value_t = qlsw_core::tomo::DEFAULT_TRIALS)]
    pub trials: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the ideal circuit and post-select the ancilla.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Variant::Optimized)]
        variant: Variant,
        /// Directory for solution.json and circuit.json; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the optical experiment and its state tomography.
    Photonic {
        #[arg(long)]
        instance: PathBuf,
        /// Noise settings; default noise when absent.
        #[arg(long)]
        noise: Option<PathBuf>,
        /// Directory for counts.json, report.json and rho.csv.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Run the photonic simulation over a grid of spectra and inputs.
    Sweep {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        noise: Option<PathBuf>,
        /// Directory for sweep.csv and one report per point.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Reconstruct a state from a counts file.
    Tomo {
        #[arg(long)]
        counts: PathBuf,
        /// Instance whose classical solution is the target.
        #[arg(long, conflicts_with = "target", required_unless_present = "target")]
        instance: Option<PathBuf>,
        /// Target state as `[[re, im], [re, im]]`.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, env = "QLSW_SEED")]
        seed: Option<u64>,
        #[arg(long, default_value_t = qlsw_core::tomo::DEFAULT_TRIALS)]
        trials: usize,
        /// Directory for tomography.json; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` and runs the command. Help and version requests are
/// printed and reported as success.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::new("usage", first_line(&e.to_string()))),
    };
    match cli.command {
        Command::Solve {
            instance,
            variant,
            out,
        } => commands::solve(&instance, variant, out.as_deref()),
        Command::Photonic {
            instance,
            noise,
            out,
            sampling,
        } => {
            let (noise, settings) = Settings::resolve(noise.as_deref(), &sampling)?;
            commands::photonic(&instance, &noise, &settings, &out)
        }
        Command::Sweep {
            grid,
            noise,
            out,
            sampling,
        } => {
            let (noise, settings) = Settings::resolve(noise.as_deref(), &sampling)?;
            commands::sweep(&grid, &noise, &settings, &out)
        }
        Command::Tomo {
            counts,
            instance,
            target,
            seed,
            trials,
            out,
        } => {
            let seed = commands::check_seed(seed.unwrap_or(commands::DEFAULT_SEED))?;
            commands::tomo(
                &counts,
                instance.as_deref(),
                target.as_deref(),
                seed,
                trials,
                out.as_deref(),
            )
        }
    }
}

fn first_line(s: &str) -> String {
    s.lines()
        .next()
        .unwrap_or_default()
        .trim_start_matches("error: ")
        .to_string()
}
