//! The `resbvp` command line: problem files in, trajectory tables and JSON
//! reports out.
//!
//! ```text
//! resbvp solve-linear <file> -o <dir>
//! resbvp solve-nonlinear <file> -o <dir> [--force]
//! resbvp sweep <file> --eps-min <a> --eps-max <b> --count <k> -o <dir>
//! resbvp fib-check --m-max <k> [-o <dir>]
//! resbvp verify <report> <trajectory>
//! ```
//!
//! Global flags: `--tol` (iteration tolerance), `--max-iter`, `--allow-quasi`,
//! `--dump-canonical` (print the effective problem file and stop).

pub mod commands;
pub mod problem;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use commands::{GlobalOptions, Outcome};
pub use problem::ProblemFile;
pub use report::RunReport;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    /// `fib-check` found no consistent convention, or `verify` disagreed.
    pub const DISAGREEMENT: i32 = 1;
    pub const QUASISOLUTION: i32 = 2;
    pub const NO_ROOT: i32 = 3;
    pub const INSUFFICIENT: i32 = 4;
    pub const NOT_CONVERGED: i32 = 5;
    pub const USAGE: i32 = 64;
    pub const IO: i32 = 74;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Solver(#[from] crate::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => exit::USAGE,
            CliError::Solver(crate::Error::QuasisolutionFamily { .. }) => exit::QUASISOLUTION,
            CliError::Solver(crate::Error::SufficientConditionFailed { .. }) => exit::INSUFFICIENT,
            CliError::Solver(_) => exit::USAGE,
            CliError::Io(_) => exit::IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "resbvp", version, about = "Boundary-value problems for difference systems in the resonance case")]
struct Cli {
    /// Iteration tolerance (overrides tolerances.iteration).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Perturbation-iteration cap (overrides solver.max_iter).
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Accept least-squares quasisolutions with exit status 0.
    #[arg(long, global = true)]
    allow_quasi: bool,
    /// Print the problem with all defaults filled in, then stop.
    #[arg(long, global = true)]
    dump_canonical: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the linear problem and write its solution family.
    SolveLinear {
        file: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Generating constants, sufficient-condition check and perturbation iteration.
    SolveNonlinear {
        file: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        /// Iterate even when the sufficient condition fails.
        #[arg(long)]
        force: bool,
    },
    /// Continuation in ε over an evenly spaced grid.
    Sweep {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        eps_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        eps_max: f64,
        #[arg(long)]
        count: usize,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Exact-integer cross-checks of the periodic Fibonacci closed forms.
    FibCheck {
        #[arg(long)]
        m_max: usize,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Recompute the residuals of a trajectory file listed in a report.
    Verify { report: PathBuf, trajectory: PathBuf },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let g = GlobalOptions {
        tol: cli.tol,
        max_iter: cli.max_iter,
        allow_quasi: cli.allow_quasi,
        dump_canonical: cli.dump_canonical,
    };
    match cli.command {
        Command::SolveLinear { file, out } => commands::solve_linear(&file, &out, &g),
        Command::SolveNonlinear { file, out, force } => commands::solve_nonlinear(&file, &out, force, &g),
        Command::Sweep { file, eps_min, eps_max, count, out } => {
            commands::sweep_cmd(&file, eps_min, eps_max, count, &out, &g)
        }
        Command::FibCheck { m_max, out } => commands::fib_check_cmd(m_max, out.as_deref()),
        Command::Verify { report, trajectory } => commands::verify(&report, &trajectory),
    }
}

/// Result of one command-line invocation, before anything is printed.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the subcommand
/// without touching the process streams.
pub fn execute<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => match run(cli) {
            Ok(o) => Execution { code: o.code, stdout: o.stdout, stderr: String::new() },
            Err(e) => Execution { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
        },
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Execution { code: exit::USAGE, stdout: String::new(), stderr: text }
            } else {
                Execution { code: exit::OK, stdout: text, stderr: String::new() }
            }
        }
    }
}

/// [`execute`], then print, reporting wall time on standard error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let start = Instant::now();
    let result = execute(args);
    print!("{}", result.stdout);
    eprint!("{}", result.stderr);
    if result.stderr.is_empty() {
        eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    }
    result.code
}
