//! `plankton-fde`: batch driver for simulation, Lipschitz and Grönwall
//! bounds, well-posedness certificates and special-function evaluation.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure,
//! 3 invariant violation or failed certificate.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Options, SpecfunCall};
use error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "plankton-fde", version, about = "Fractional plankton-oxygen model toolkit")]
struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Seed for sampled certificates.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Number of sampled pairs for the empirical Lipschitz ratio.
    #[arg(long, global = true, value_name = "N")]
    empirical: Option<usize>,

    /// Tolerance: backend distance for `wellposed`, relative remainder for `gronwall`.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the model; writes trajectory.csv and run_meta.json.
    Simulate,
    /// Lipschitz constants on the configured box; writes lipschitz_report.json.
    Lipschitz,
    /// Grönwall bounds for the configured inequality; writes gronwall_report.json.
    Gronwall,
    /// Uniqueness, envelope, dependence and box checks; writes wellposed_report.json.
    Wellposed,
    /// Evaluate a special function.
    Specfun {
        #[command(subcommand)]
        function: Specfun,
    },
}

#[derive(Debug, Subcommand)]
#[command(args_conflicts_with_subcommands = true)]
enum Specfun {
    /// E_α(z)
    #[command(allow_negative_numbers = true)]
    Ml { alpha: f64, z: f64 },
    /// E_{α,β}(z)
    #[command(allow_negative_numbers = true)]
    Ml2 { alpha: f64, beta: f64, z: f64 },
    /// ζ_α(θ)
    #[command(allow_negative_numbers = true)]
    Zeta { alpha: f64, theta: f64 },
    /// Normalization, first moment and Laplace checks of ζ_α
    #[command(allow_negative_numbers = true)]
    ZetaCheck { alpha: f64 },
}

fn run(cli: Cli) -> CliResult<()> {
    let opts = Options {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        empirical: cli.empirical,
        tol: cli.tol,
    };
    if let Some(path) = &opts.config {
        commands::ensure_exists(path)?;
    }
    match cli.command {
        Command::Simulate => commands::simulate(&opts),
        Command::Lipschitz => commands::lipschitz(&opts),
        Command::Gronwall => commands::gronwall(&opts),
        Command::Wellposed => commands::wellposed(&opts),
        Command::Specfun { function } => commands::specfun(&match function {
            Specfun::Ml { alpha, z } => SpecfunCall::Ml { alpha, z },
            Specfun::Ml2 { alpha, beta, z } => SpecfunCall::Ml2 { alpha, beta, z },
            Specfun::Zeta { alpha, theta } => SpecfunCall::Zeta { alpha, theta },
            Specfun::ZetaCheck { alpha } => SpecfunCall::ZetaCheck { alpha },
        }),
    }
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
