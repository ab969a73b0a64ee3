//! `c3s`: classify three-charge systems, dump effective potentials, sweep the
//! criterion over mass space and run the verification suite.
//!
//! Exit codes: 0 success (whatever the verdict), 1 usage or input error,
//! 2 numerical failure, 3 verification failure.

mod commands;
mod record;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "c3s", version, about = "Instability certificates for three unit charges {+1,-1,-1}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a system given by its three masses.
    Analyze(AnalyzeArgs),
    /// Dump y, V_eff, y^2 V_eff and the 3/(16 y^2) envelope as CSV.
    Veff(VeffArgs),
    /// Sweep the criterion over an N x N mass grid, as CSV.
    Region(RegionArgs),
    /// List the particle table or classify a named system.
    Catalog(CatalogArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Mass of particle 1 (number or "inf").
    #[arg(long, allow_hyphen_values = true)]
    m1: String,
    #[arg(long, allow_hyphen_values = true)]
    m2: String,
    #[arg(long, allow_hyphen_values = true)]
    m3: String,
    /// Charge signs of particles 1-3, e.g. "+--" or "-1,1,1".
    #[arg(long, default_value = "+--", allow_hyphen_values = true)]
    charges: String,
    #[arg(long)]
    json: bool,
    /// Re-derive the verdict with the numeric V_eff.
    #[arg(long)]
    deep: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VeffMode {
    Numeric,
    Semianalytic,
    Both,
}

#[derive(Args, Debug)]
struct VeffArgs {
    /// Mass parameter a = m2/(m1+m2).
    #[arg(long)]
    a: f64,
    #[arg(long, default_value_t = 0.05)]
    y_min: f64,
    #[arg(long, default_value_t = 50.0)]
    y_max: f64,
    /// Number of log-spaced y values.
    #[arg(long, default_value_t = 40)]
    points: usize,
    #[arg(long, value_enum, default_value_t = VeffMode::Numeric)]
    mode: VeffMode,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SchemeArg {
    Ratios,
    Barycentric,
    InfiniteNucleus,
}

#[derive(Args, Debug)]
struct RegionArgs {
    /// Points per axis.
    #[arg(long, default_value_t = 20)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::Ratios)]
    scheme: SchemeArg,
}

#[derive(Args, Debug)]
struct CatalogArgs {
    /// Classify a named system (pmue, mupe, hminus, psminus).
    #[arg(long)]
    classify: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Include the Monte-Carlo and eigensolver cross-checks.
    #[arg(long)]
    deep: bool,
    #[arg(long, default_value_t = 1_000_000)]
    mc_samples: usize,
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
    #[arg(long)]
    json: bool,
    /// Report this value as the ratio threshold (negative control).
    #[arg(long, hide = true)]
    tamper_threshold: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(&a, &echo),
        Command::Veff(a) => commands::veff(&a, &echo),
        Command::Region(a) => commands::region(&a, &echo),
        Command::Catalog(a) => commands::catalog(&a, &echo),
        Command::Verify(a) => commands::verify(&a, &echo),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
