//! `bipencil`: curvature of bi-Hamiltonian pencils in three dimensions.
//!
//! Exit status: 0 success, 1 a mathematical check failed, 2 bad input.

mod commands;
mod problem;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use problem::{parse_point, Problem};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("check failed: {0}")]
    Math(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Math(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GaugeArg {
    Default,
    Alt,
}

#[derive(Parser, Debug)]
#[command(name = "bipencil", version, about = "Curvature of compatible Poisson pencils in 3D")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify the Jacobi, cocycle, Casimir and frame identities of a problem file.
    Check { file: PathBuf },
    /// Exact curvature form, optionally evaluated and checked numerically.
    Curvature {
        file: PathBuf,
        /// Evaluate at a point `x,y,z` (rationals). Repeatable.
        #[arg(long, allow_hyphen_values = true)]
        at: Vec<String>,
        /// Compare against the finite-difference curvature.
        #[arg(long)]
        numeric_check: bool,
        /// Finite-difference step.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Linearize at a singular point and report the flatness obstruction.
    Linearize {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Blaschke curvature of a planar 3-web, with the hexagon ladder if requested.
    WebCurvature { file: PathBuf },
    /// Compare the pencil curvature with the Blaschke curvature of its Casimir web.
    ReduceCheck {
        file: PathBuf,
        /// Skip exact elimination and compare at sample points.
        #[arg(long)]
        numeric_check: bool,
    },
    /// Check that -4 Alt Ric of the frame connection equals the curvature.
    ConnectionCheck {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = GaugeArg::Default)]
        gauge: GaugeArg,
    },
}

fn run(cli: &Cli) -> commands::Outcome {
    match &cli.command {
        Command::Check { file } => commands::check_cmd(&Problem::load(file)?),
        Command::Curvature { file, at, numeric_check, step } => {
            let pr = Problem::load(file)?;
            let points = at.iter().map(|p| parse_point(p, pr.vars.len())).collect::<Result<Vec<_>, _>>()?;
            commands::curvature_cmd(&pr, &points, *numeric_check, *step)
        }
        Command::Linearize { file, at } => {
            let pr = Problem::load(file)?;
            let point = at.as_deref().map(|p| parse_point(p, pr.vars.len())).transpose()?;
            commands::linearize_cmd(&pr, point)
        }
        Command::WebCurvature { file } => commands::web_cmd(&Problem::load(file)?),
        Command::ReduceCheck { file, numeric_check } => commands::reduce_cmd(&Problem::load(file)?, *numeric_check),
        Command::ConnectionCheck { file, gauge } => {
            commands::connection_cmd(&Problem::load(file)?, *gauge == GaugeArg::Alt)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, ok)) => {
            match cli.format {
                Format::Text => print!("{}", report.text()),
                Format::Json => println!("{}", report.json()),
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
