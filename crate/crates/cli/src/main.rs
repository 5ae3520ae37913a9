//! Command-line driver: equilibrium solves, phase scans, critical couplings,
//! Monte-Carlo runs and density comparisons, written as CSV and JSON.

mod commands;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ncg_spectra::{Ansatz, Error, GeometryModel};

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub const USAGE: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const DOMAIN: u8 = 4;

    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: Self::USAGE,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NonConvergence { .. }
            | Error::SingularJacobian { .. }
            | Error::ResidualViolation { .. }
            | Error::NonAdmissibleDensity(_)
            | Error::SeedFailure { .. }
            | Error::NearSingularity { .. } => CliError::NUMERICAL,
            Error::Io(_) => 1,
            _ => CliError::DOMAIN,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_model(s: &str) -> Result<GeometryModel, String> {
    GeometryModel::from_str(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub enum AnsatzArg {
    Auto,
    Fixed(Ansatz),
}

impl From<AnsatzArg> for String {
    fn from(a: AnsatzArg) -> String {
        match a {
            AnsatzArg::Auto => "auto".into(),
            AnsatzArg::Fixed(a) => a.label().into(),
        }
    }
}

impl FromStr for AnsatzArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(AnsatzArg::Auto),
            "sym1" | "sym2" | "asym2" => Ok(AnsatzArg::Fixed(s.parse().map_err(|e: Error| e.to_string())?)),
            other => Err(format!("unknown ansatz '{other}' (expected sym1, sym2, asym2 or auto)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "String")]
pub enum InitArg {
    Even,
    FromTheory,
    File(PathBuf),
}

impl From<InitArg> for String {
    fn from(i: InitArg) -> String {
        match i {
            InitArg::Even => "even".into(),
            InitArg::FromTheory => "from-theory".into(),
            InitArg::File(p) => format!("file:{}", p.display()),
        }
    }
}

impl FromStr for InitArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "even" => Ok(InitArg::Even),
            "from-theory" => Ok(InitArg::FromTheory),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(InitArg::File(PathBuf::from(p))),
                _ => Err(format!("unknown init '{s}' (expected even, from-theory or file:PATH)")),
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ncg-spectra", version, about = "Spectral densities of the quartic (1,0)/(0,1) matrix ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve all applicable branches at one coupling and select the minimizer.
    Equilibrium(EquilibriumArgs),
    /// Candidate branches over a range of couplings.
    Scan(ScanArgs),
    /// Critical coupling of the phase transition.
    Critical(CriticalArgs),
    /// Metropolis sampling of the eigenvalue distribution.
    Mc(McArgs),
    /// Distances between a theoretical density and a histogram.
    Compare(CompareArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct EquilibriumArgs {
    /// 10, 01
    #[arg(long, value_parser = parse_model)]
    pub model: GeometryModel,
    #[arg(long, allow_negative_numbers = true)]
    pub g: f64,
    /// sym1, sym2, asym2 or auto
    #[arg(long, default_value = "auto")]
    pub ansatz: AnsatzArg,
    /// Number of density samples in density.csv.
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long, value_parser = parse_model)]
    pub model: GeometryModel,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub step: f64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CriticalArgs {
    #[arg(long, value_parser = parse_model)]
    pub model: GeometryModel,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub bracket: Option<Vec<f64>>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct McArgs {
    /// 10, 01 or gue
    #[arg(long, value_parser = parse_model)]
    pub model: GeometryModel,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub g: f64,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 20_000)]
    pub sweeps: usize,
    /// Defaults to a tenth of the sweeps.
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// even, from-theory or file:PATH (a checkpoint)
    #[arg(long, default_value = "even")]
    pub init: InitArg,
    /// Initial proposal width.
    #[arg(long, default_value_t = 0.1)]
    pub width: f64,
    /// Sweeps between recorded samples.
    #[arg(long, default_value_t = 10)]
    pub sample_every: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    /// CSV with columns lambda,rho.
    #[arg(long)]
    pub theory: PathBuf,
    /// CSV with columns bin_center,density.
    #[arg(long)]
    pub mc: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(CliError::USAGE),
            };
        }
    };
    let result = match cli.command {
        Command::Equilibrium(a) => commands::equilibrium(&a),
        Command::Scan(a) => commands::scan(&a),
        Command::Critical(a) => commands::critical(&a),
        Command::Mc(a) => commands::mc(&a),
        Command::Compare(a) => commands::compare(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
