//! `tvd`: estimate total variation distances between product distributions
//! and Markov chains from instance files.

mod commands;
mod error;
mod instance;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tvd_core::generate::DEFAULT_SKEW;

use crate::commands::Kind;
use crate::error::{CliError, CliResult};
use crate::report::Mode;

#[derive(Debug, Parser)]
#[command(name = "tvd", version, about = "Total variation distance estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the TV distance of an instance file and print a JSON report.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        /// Relative error, in (0, 1). Required in mode fptas.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, default_value = "fptas")]
        mode: Mode,
        /// Write the Neyman-Pearson boundary of the final ratio as CSV.
        #[arg(long)]
        emit_region: Option<PathBuf>,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded random instance file.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        seed: u64,
        /// Gamma shape; small is spiky, large is near uniform.
        #[arg(long, default_value_t = DEFAULT_SKEW)]
        skew: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the estimator over a grid of random instances and print CSV.
    Bench {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        q: Vec<usize>,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        epsilon: Vec<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SKEW)]
        skew: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Estimate {
            input,
            epsilon,
            mode,
            emit_region,
            out,
        } => {
            let text = commands::estimate(&input, epsilon, mode, emit_region.as_deref())?.emit();
            if let Some(path) = out {
                commands::write_output(&path, &text)?;
            }
            Ok(text)
        }
        Command::Gen {
            kind,
            n,
            q,
            seed,
            skew,
            out,
        } => {
            commands::gen(kind, n, q, seed, skew, &out)?;
            Ok(String::new())
        }
        Command::Bench {
            kind,
            n,
            q,
            epsilon,
            seed,
            skew,
            out,
        } => {
            let csv = commands::bench(kind, &n, &q, &epsilon, seed, skew)?;
            if let Some(path) = out {
                commands::write_output(&path, &csv)?;
            }
            Ok(csv)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("invalid arguments");
            let msg = first.trim_start_matches("error: ");
            eprintln!("{}", CliError::Usage(msg.to_string()).line());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::FAILURE
        }
    }
}
