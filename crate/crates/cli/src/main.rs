//! `opuc`: orthogonal polynomials on the unit circle from the command line.
//!
//! Exit codes: 0 success, 1 failed verification check, 2 bad input or
//! arguments, 3 numerical error, 4 evaluation point not inside the disk.

mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Quantity, Suite, VerifyOptions};
use input::{load_input, parse_grid, CliError, EXIT_FAILED_CHECK, EXIT_PARSE};

#[derive(Parser, Debug)]
#[command(name = "opuc", version, about = "Verblunsky coefficients, m-function analogs and sum-rule checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Measure, coefficient or law spec (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of j, αⱼ and ρⱼ.
    Verblunsky {
        #[command(flatten)]
        common: Common,
        /// Number of coefficients (default 20 for measures, the sequence length otherwise).
        #[arg(long)]
        order: Option<usize>,
    },
    /// One of F, R, f, D, delta0D, m_tilde, m_plus0, green on a z-grid.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// `polar:r1,r2,…:count` or `points:re,im;re,im;…`.
        #[arg(long, default_value = "polar:0.5:8")]
        grid: String,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        suite: Suite,
        /// Truncation order, number of steps, or K, depending on the suite.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        grid: Option<String>,
        /// Overrides the suite's default tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Lyapunov exponent and decay rate, deterministic or Monte Carlo.
    Lyapunov {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: Option<String>,
        /// Number of transfer steps for stochastic laws.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::parse(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::parse(format!("cannot write to stdout: {e}"))),
    }
}

fn grid_arg(grid: &Option<String>) -> Result<Option<Vec<num_complex::Complex64>>, CliError> {
    grid.as_deref().map(parse_grid).transpose()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verblunsky { common, order } => {
            let input = load_input(&common.input)?;
            emit(&common, &commands::verblunsky(&input, order)?)
        }
        Command::Evaluate { common, quantity, grid } => {
            let input = load_input(&common.input)?;
            let grid = parse_grid(&grid)?;
            emit(&common, &commands::evaluate(&input, quantity, &grid)?)
        }
        Command::Verify { common, suite, order, grid, tolerance, seed } => {
            let input = load_input(&common.input)?;
            let opts = VerifyOptions { order, grid: grid_arg(&grid)?, tolerance, seed };
            let checks = commands::verify(&input, suite, &opts)?;
            emit(&common, &commands::report_csv(&checks))?;
            let failed = checks.iter().filter(|c| !c.passed()).count();
            if failed > 0 {
                return Err(CliError {
                    code: EXIT_FAILED_CHECK,
                    message: format!("verify {}: {failed} of {} checks failed", suite.name(), checks.len()),
                });
            }
            Ok(())
        }
        Command::Lyapunov { common, grid, order, seed } => {
            let input = load_input(&common.input)?;
            let grid = grid_arg(&grid)?;
            emit(&common, &commands::lyapunov(&input, grid.as_deref(), order, seed)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_PARSE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("opuc: {e}");
            ExitCode::from(e.code)
        }
    }
}
