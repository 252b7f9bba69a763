//! Command-line front end. Every subcommand prints one JSON report.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mixfie::cli::{self, CertifyRun, EnsembleSpec};
use mixfie::solver::{Scheme, SolveConfig};
use mixfie::wkmeasure::Schedules;

#[derive(Parser)]
#[command(
    name = "mixfie",
    version,
    about = "Certify, solve and measure mixed-type functional integral equations"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Picard,
    Split,
}

#[derive(Subcommand)]
enum Command {
    /// Run the contraction certificate and the sampling checks.
    Certify {
        /// Problem file, or the name of a bundled problem.
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
    /// Iterate to a fixed point from x0 = 0.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = SchemeArg::Picard)]
        scheme: SchemeArg,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        damping: f64,
        /// Write the `(t, x(t))` node table as CSV to this path and include it in the report.
        #[arg(long, value_name = "PATH")]
        emit_table: Option<PathBuf>,
    },
    /// Estimate the weak-noncompactness measure of an ensemble and its image.
    Measure {
        file: PathBuf,
        /// `kind:size` with kind one of zero, concentrating, escaping, random-in-ball, oscillating.
        #[arg(long)]
        ensemble: EnsembleSpec,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compare the parts of the image measure against the parts of the source.
        #[arg(long)]
        cross: bool,
    },
    /// Certify and solve the bundled worked example.
    Demo {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(args: Args) -> mixfie::Result<String> {
    let report = match args.command {
        Command::Certify {
            file,
            seed,
            samples,
            pairs,
        } => {
            let def = cli::load_problem(&file)?;
            cli::run_certify(
                &def,
                &CertifyRun {
                    seed,
                    samples,
                    pairs,
                    ..CertifyRun::default()
                },
            )?
        }
        Command::Solve {
            file,
            scheme,
            tol,
            max_iters,
            damping,
            emit_table,
        } => {
            let def = cli::load_problem(&file)?;
            let config = SolveConfig {
                scheme: match scheme {
                    SchemeArg::Picard => Scheme::Picard,
                    SchemeArg::Split => Scheme::Split,
                },
                tol: tol.unwrap_or(def.numerics.tol),
                max_iters: max_iters.unwrap_or(def.numerics.max_iters),
                damping,
                ..SolveConfig::default()
            };
            let (report, raw) = cli::run_solve(&def, &config, emit_table.is_some())?;
            if let Some(path) = emit_table {
                std::fs::write(path, cli::table_csv(&raw.final_iterate))?;
            }
            report
        }
        Command::Measure {
            file,
            ensemble,
            seed,
            cross,
        } => {
            let def = cli::load_problem(&file)?;
            cli::run_measure(&def, &ensemble, &Schedules::default(), seed, cross)?
        }
        Command::Demo { seed } => cli::run_demo(seed)?,
    };
    Ok(report.to_json())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(json) => {
            println!("{json}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
