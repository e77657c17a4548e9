use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "seqdisc",
    version,
    about = "Sequential unambiguous discrimination and discord"
)]
pub struct Cli {
    /// File of `key = value` lines pre-setting any flag; flags given on the
    /// command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Defaults to csv for `curve` and json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximum joint success probability, closed form and numeric.
    Optimize(OptimizeArgs),
    /// Figure data: D_Δ against a success probability, or D_symm against s.
    Curve(CurveArgs),
    /// Left/right discords from the closed form and from direct minimization.
    Discord(DiscordArgs),
    /// Monte Carlo run of the equal-weight protocol.
    Simulate(SimulateArgs),
    /// POVM elements realized by Bob's and Charlie's unitaries.
    Povm(PovmArgs),
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_parser = unit)]
    pub s: f64,
    /// Numeric search grid points per axis.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    #[value(name = "2a")]
    Fig2a,
    #[value(name = "2b")]
    Fig2b,
    #[value(name = "3")]
    Fig3,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum)]
    pub figure: Figure,
    /// Charlie's success probability held fixed (figure 2a).
    #[arg(long, value_parser = unit)]
    pub pc: Option<f64>,
    /// Bob's success probability held fixed (figure 2b).
    #[arg(long, value_parser = unit)]
    pub pb: Option<f64>,
    /// α in t = s^α (figure 3).
    #[arg(long, default_value_t = 0.5, value_parser = open_unit)]
    pub exponent: f64,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    pub points: u64,
}

#[derive(Debug, Args)]
pub struct DiscordArgs {
    #[arg(long, value_parser = unit)]
    pub r: f64,
    #[arg(long, value_parser = unit)]
    pub t: f64,
    /// Angle grid per axis for the direct minimization.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = unit)]
    pub s: f64,
    #[arg(long, value_parser = unit)]
    pub t: f64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; the output does not depend on this.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PovmArgs {
    #[arg(long, value_parser = unit)]
    pub s: f64,
    #[arg(long, value_parser = unit)]
    pub t: f64,
}

fn unit(raw: &str) -> Result<f64, String> {
    let x: f64 = raw.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is outside [0, 1]"))
    }
}

fn open_unit(raw: &str) -> Result<f64, String> {
    let x: f64 = raw.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(format!("{x} is outside (0, 1)"))
    }
}
