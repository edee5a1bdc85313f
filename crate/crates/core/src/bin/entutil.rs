use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use entutil::cli::{cmd_concurrence, cmd_sweep, cmd_utility_curves, CliError, RunConfig};
use entutil::optimizer::OptimizerConfig;
use entutil::protocol::{MixWeighting, Side};
use entutil::strategy::DEFAULT_THETA_MIN;
use entutil::utility::{UtilityArgument, UtilityFamily};

#[derive(Parser, Debug)]
#[command(name = "entutil", version, about = "Expected utility of heralded entanglement with feed-forward")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Concurrence and entanglement of formation of a state file.
    Concurrence {
        /// `ket` or `dm` followed by `re im` pairs.
        file: PathBuf,
    },
    /// Tabulate optimal feed-forward over (theta, w) and the best w per utility.
    Sweep(SweepArgs),
    /// Sample utility functions on [0, 1].
    UtilityCurves {
        /// `power:n` or `threshold:e0,n`; repeatable.
        #[arg(long = "utility", required = true)]
        utilities: Vec<UtilityFamily>,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
struct SweepArgs {
    #[arg(long, default_value_t = 200)]
    theta_points: usize,
    /// Use 1000 coupling points.
    #[arg(long, conflicts_with = "theta_points")]
    full_scale: bool,
    #[arg(long, default_value_t = DEFAULT_THETA_MIN)]
    theta_min: f64,
    #[arg(long, default_value_t = 0.001)]
    w_step: f64,
    /// `power:n` or `threshold:e0,n`; repeatable. Defaults to power:1, power:2, power:3.
    #[arg(long = "utility")]
    utilities: Vec<UtilityFamily>,
    /// Feed-forward cost; repeatable. Defaults to 0.
    #[arg(long = "cost")]
    costs: Vec<f64>,
    /// Quantity the utility is applied to.
    #[arg(long, default_value = "eof")]
    utility_of: UtilityArgument,
    /// System receiving the unitary (1 or 2).
    #[arg(long, default_value_t = 2)]
    side: u8,
    /// Mixture weighting: `equal` or `probability`.
    #[arg(long, default_value = "equal")]
    weighting: MixWeighting,
    #[arg(long, default_value_t = 8)]
    grid: usize,
    #[arg(long, default_value_t = 10)]
    starts: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
}

impl SweepArgs {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let defaults = RunConfig::default();
        let side = Side::from_index(self.side)
            .map_err(|_| CliError::Config(vec![format!("side must be 1 or 2, got {}", self.side)]))?;
        Ok(RunConfig {
            theta_points: if self.full_scale { 1000 } else { self.theta_points },
            theta_min: self.theta_min,
            w_step: self.w_step,
            utilities: if self.utilities.is_empty() {
                defaults.utilities
            } else {
                self.utilities
            },
            costs: if self.costs.is_empty() {
                defaults.costs
            } else {
                self.costs
            },
            argument: self.utility_of,
            side,
            weighting: self.weighting,
            optimizer: OptimizerConfig {
                grid: self.grid,
                starts: self.starts,
                ..OptimizerConfig::default()
            },
            out: self.out,
            workers: self.workers,
        })
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Concurrence { file } => {
            print!("{}", cmd_concurrence(&file)?);
        }
        Command::Sweep(args) => {
            let cfg = args.into_config()?;
            let result = cmd_sweep(&cfg)?;
            eprintln!(
                "wrote {} table rows and {} strategy rows to {}",
                result.table.cells().len(),
                result.records.len(),
                cfg.out.display()
            );
        }
        Command::UtilityCurves {
            utilities,
            samples,
            out,
        } => {
            let csv = cmd_utility_curves(&utilities, samples)?;
            match out {
                Some(path) => std::fs::write(&path, csv).map_err(|e| CliError::Io {
                    context: format!("writing {}", path.display()),
                    source: e,
                })?,
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
