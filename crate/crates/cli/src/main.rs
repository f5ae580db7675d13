//! `turan`: evaluate Hermite and parabolic cylinder functions of negative
//! order, scan the ratio `R_ν` for monotonicity and bounds, and check the
//! Ornstein–Uhlenbeck hitting-time identities by simulation.

// `!(a > b)` checks reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod exit;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::config::ConfigFile;
use crate::exit::Exit;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "turan", version, about)]
struct Cli {
    /// Flat JSON object of parameter defaults keyed by flag name (`rel_tol`,
    /// `nu`, ...). Flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate H_ν(x) or D_ν(x).
    Eval(EvalArgs),
    /// Tabulate R_ν, R̃_ν, the Turán margin or Ψ on a uniform grid and check
    /// monotonicity, bounds and limits.
    Scan(ScanArgs),
    /// Run one numerical or Monte Carlo check and report a verdict.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Compare the library against a golden reference file.
    Golden(GoldenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum Func {
    #[value(name = "H")]
    H,
    #[value(name = "D")]
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum Which {
    #[value(name = "ratioH")]
    #[serde(rename = "ratioH")]
    RatioH,
    #[value(name = "ratioD")]
    #[serde(rename = "ratioD")]
    RatioD,
    #[value(name = "turan")]
    #[serde(rename = "turan")]
    Turan,
    #[value(name = "psi")]
    #[serde(rename = "psi")]
    Psi,
}

#[derive(Debug, Args)]
pub struct QuadArgs {
    /// Relative tolerance of the adaptive quadrature [default: 1e-12].
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Subdivision budget of the adaptive quadrature [default: 200].
    #[arg(long)]
    max_subdivisions: Option<usize>,
    /// Tail cut in standard deviations of the integrand peak [default: 12].
    #[arg(long)]
    tail_sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output format [default: csv].
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    func: Option<Func>,
    /// Order ν < 0.
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    #[command(flatten)]
    quad: QuadArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    which: Option<Which>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    xmin: Option<f64>,
    #[arg(long)]
    xmax: Option<f64>,
    /// Number of grid points (at least 3).
    #[arg(long)]
    n: Option<usize>,
    /// OU mean, for `--which psi` [default: 0].
    #[arg(long)]
    mu: Option<f64>,
    /// OU volatility, for `--which psi` [default: 1].
    #[arg(long)]
    sigma: Option<f64>,
    /// Where to write the JSON summary in csv mode [default: stderr].
    #[arg(long, value_name = "PATH")]
    summary: Option<PathBuf>,
    #[command(flatten)]
    quad: QuadArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Monte Carlo Laplace transform of the hitting time vs the eigenfunction ratio.
    Eq5(Eq5Args),
    /// Monte Carlo Hölder gap on a common sample.
    Holder(HolderArgs),
    /// Residual of the OU generator eigen-equation.
    Generator(GeneratorArgs),
    /// Residual of the D_ν / H_ν rescaling identity.
    Identity(IdentityArgs),
}

#[derive(Debug, Args)]
pub struct OuArgs {
    /// OU mean [default: 0].
    #[arg(long)]
    mu: Option<f64>,
    /// OU volatility [default: 1].
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Number of simulated paths [default: 100000].
    #[arg(long)]
    paths: Option<usize>,
    /// Time step [default: 1e-3].
    #[arg(long)]
    dt: Option<f64>,
    /// Censoring horizon [default: 200].
    #[arg(long)]
    t_max: Option<f64>,
    /// RNG seed. Required when CI_STRICT=1, otherwise drawn and reported.
    #[arg(long)]
    seed: Option<u64>,
    /// Disable the Brownian-bridge crossing correction.
    #[arg(long)]
    no_bridge: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct Eq5Args {
    #[arg(long)]
    nu: Option<f64>,
    /// Derivative order, 0..=3 [default: 0].
    #[arg(long)]
    k: Option<u32>,
    /// Start level.
    #[arg(long)]
    x: Option<f64>,
    /// Target level, above the start.
    #[arg(long)]
    y: Option<f64>,
    #[command(flatten)]
    ou: OuArgs,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct HolderArgs {
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    #[command(flatten)]
    ou: OuArgs,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct GeneratorArgs {
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    #[command(flatten)]
    ou: OuArgs,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct IdentityArgs {
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GoldenArgs {
    /// Golden JSON file.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Per-entry tolerance, relative to max(1, |ln|value||) [default: 1e-10].
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Subdivision budget of the adaptive quadrature [default: 200].
    #[arg(long)]
    max_subdivisions: Option<usize>,
    /// Tail cut in standard deviations of the integrand peak [default: 12].
    #[arg(long)]
    tail_sigma: Option<f64>,
    #[command(flatten)]
    out: OutArgs,
}

/// Borrowed view of the arguments shared by `verify eq5` and `verify holder`.
pub struct EqArgsView<'a> {
    nu: Option<f64>,
    x: Option<f64>,
    y: Option<f64>,
    ou: &'a OuArgs,
    sim: &'a SimArgs,
    quad: &'a QuadArgs,
    output: &'a Option<PathBuf>,
}

impl<'a> From<&'a Eq5Args> for EqArgsView<'a> {
    fn from(a: &'a Eq5Args) -> Self {
        Self {
            nu: a.nu,
            x: a.x,
            y: a.y,
            ou: &a.ou,
            sim: &a.sim,
            quad: &a.quad,
            output: &a.output,
        }
    }
}

impl<'a> From<&'a HolderArgs> for EqArgsView<'a> {
    fn from(a: &'a HolderArgs) -> Self {
        Self {
            nu: a.nu,
            x: a.x,
            y: a.y,
            ou: &a.ou,
            sim: &a.sim,
            quad: &a.quad,
            output: &a.output,
        }
    }
}

fn run(cli: Cli) -> Result<Exit, exit::CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Eval(a) => commands::eval(a, &cfg),
        Command::Scan(a) => commands::scan(a, &cfg),
        Command::Verify(VerifyCommand::Eq5(a)) => commands::verify_eq5(a, &cfg),
        Command::Verify(VerifyCommand::Holder(a)) => commands::verify_holder(a, &cfg),
        Command::Verify(VerifyCommand::Generator(a)) => commands::verify_generator(a, &cfg),
        Command::Verify(VerifyCommand::Identity(a)) => commands::verify_identity(a, &cfg),
        Command::Golden(a) => commands::golden(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit.into()
        }
    }
}
