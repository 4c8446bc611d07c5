use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use cylou_cli::{cmd_check, cmd_compare, cmd_demo_heat, cmd_simulate, heat_law_text, CliError, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "cylou", version, about = "Stationarity of Ornstein-Uhlenbeck processes driven by cylindrical Lévy noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide existence of a stationary measure and write the JSON report.
    Check {
        config: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Simulate an ensemble and write per-functional statistics as CSV.
    Simulate {
        config: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also write the final-time sample to this CSV file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Write convergence curves and identity residuals as CSV.
    Compare {
        config: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Built-in examples.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Stochastic heat equation on a d-dimensional domain with canonical
    /// alpha-stable noise.
    Heat {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        dim: u32,
        #[arg(long, default_value_t = 64)]
        modes: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn workers() -> Result<usize, CliError> {
    match std::env::var("SIM_WORKERS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Config(format!("SIM_WORKERS must be a positive integer, got {s:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Check { config, out } => cmd_check(&config, out.as_deref()),
        Command::Simulate { config, out, dump } => {
            cmd_simulate(&config, out.as_deref(), dump.as_deref(), workers()?)
        }
        Command::Compare { config, out } => cmd_compare(&config, out.as_deref()),
        Command::Demo {
            demo: Demo::Heat { alpha, dim, modes, out },
        } => {
            eprintln!("{}", heat_law_text(alpha, dim)?);
            cmd_demo_heat(alpha, dim, modes, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_CONFIG as u8),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
