//! Command-line front end: load a config, run one command, emit the report.
//!
//! Exit codes: 0 success, 1 a check command found a failing invariant,
//! 2 configuration or usage problems, 3 computation errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use orbitdeg::config::load_config;
use orbitdeg::fixture::make_fixture;
use orbitdeg::report::{apply_overrides, run_command, Format};
use orbitdeg::Result;

#[derive(Parser)]
#[command(
    name = "orbitdeg",
    version,
    about = "Dynamical degrees, orbits, and height growth for finite families of self-maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Csv,
    Jsonl,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Format {
        match f {
            OutputFormat::Table => Format::Table,
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Jsonl => Format::Jsonl,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Path to a system config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output format; table includes timings, csv/jsonl are byte-stable.
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured truncation level.
    #[arg(long)]
    n_max: Option<usize>,
    /// Override the growth-bound epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Override the canonical-height convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Dynamical degree bracket [lower, upper] of the pullback family.
    Delta(RunArgs),
    /// Arithmetic degree trace alpha_n along the first configured point.
    Alpha(RunArgs),
    /// Canonical height via beta-normalized orbit stages.
    Canheight(RunArgs),
    /// Orbit levels within each configured height budget.
    Count(RunArgs),
    /// Distinct orbit points within a height budget, with growth exponents.
    Orbitcount(RunArgs),
    /// Preperiodicity probe for the first configured point.
    Preperiodic(RunArgs),
    /// Eigendivisor of the summed pullback and its degree condition.
    Eigendiv(RunArgs),
    /// Structural invariant suite; exit code 1 if any row fails.
    Check(RunArgs),
    /// Generate a ready-to-run fixture config.
    Fixture {
        /// One of: k3, matrix_pair_4, matrix_pair_5, matrix_triple,
        /// p1_doubling. Only k3 consumes the seed.
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the config to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    fn run_parts(&self) -> Option<(&'static str, &RunArgs)> {
        match self {
            Command::Delta(a) => Some(("delta", a)),
            Command::Alpha(a) => Some(("alpha", a)),
            Command::Canheight(a) => Some(("canheight", a)),
            Command::Count(a) => Some(("count", a)),
            Command::Orbitcount(a) => Some(("orbitcount", a)),
            Command::Preperiodic(a) => Some(("preperiodic", a)),
            Command::Eigendiv(a) => Some(("eigendiv", a)),
            Command::Check(a) => Some(("check", a)),
            Command::Fixture { .. } => None,
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Fixture { kind, seed, out } => {
            let raw = make_fixture(kind, *seed)?;
            let mut json = serde_json::to_string_pretty(&raw)
                .expect("fixture configs serialize");
            json.push('\n');
            write_output(out.as_deref(), &json)?;
            Ok(ExitCode::SUCCESS)
        }
        cmd => {
            let (name, args) = cmd.run_parts().expect("non-fixture commands carry run args");
            let mut cfg = load_config(&args.config)?;
            apply_overrides(&mut cfg, args.n_max, args.epsilon, args.tol);
            let report = run_command(name, &cfg)?;
            write_output(args.out.as_deref(), &report.emit(args.format.into()))?;
            if report.passed == Some(false) {
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jsonl = cli
        .command
        .run_parts()
        .is_some_and(|(_, a)| a.format == OutputFormat::Jsonl);
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            let code = e.exit_code();
            if jsonl {
                let obj = serde_json::json!({
                    "error": e.to_string(),
                    "exit_code": code,
                });
                eprintln!("{obj}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code as u8)
        }
    }
}
