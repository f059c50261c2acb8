//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::numlist::NumList;

#[derive(Debug, Parser)]
#[command(name = "lane-emden", version, about = "Numerical experiments for the Lane-Emden system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify the half-space inequalities on an (n, p) grid.
    VerifyIneq(VerifyArgs),
    /// Ground states on R^n at the critical hyperbola.
    Entire(EntireArgs),
    /// Radial solutions on the unit ball at q = q_eps.
    Ball(BallArgs),
    /// Blow-up scan along a decreasing eps list.
    Scan(ScanArgs),
    /// Green's function checks on the unit ball.
    Green(GreenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    As0,
    As1,
    Master,
    B50,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Dimensions, e.g. `5..12` or `5,7`.
    #[arg(long)]
    pub n: NumList,
    /// Exponents; defaults to a 5-point grid inside the regime of `--which`.
    #[arg(long)]
    pub p: Option<NumList>,
    #[arg(long, value_enum)]
    pub which: Which,
    /// Quadrature tolerance (1e-8 for as0, 1e-7 otherwise).
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct EntireArgs {
    #[arg(long)]
    pub n: NumList,
    #[arg(long)]
    pub p: NumList,
    /// Relative bracket width of the shooting parameter.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct BallArgs {
    #[arg(long)]
    pub n: NumList,
    #[arg(long)]
    pub p: NumList,
    #[arg(long)]
    pub eps: NumList,
    /// Shooting mismatch tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Shell radii for the Green comparison of `v`.
    #[arg(long)]
    pub shells: Option<NumList>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub n: NumList,
    #[arg(long)]
    pub p: NumList,
    /// Strictly decreasing.
    #[arg(long, default_value = "0.02,0.01,0.005,0.002")]
    pub eps: NumList,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Shell radii for the Green comparison of `v` along the scan.
    #[arg(long)]
    pub shells: Option<NumList>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct GreenArgs {
    #[arg(long)]
    pub n: NumList,
    /// Exponents for G̃ and H̃.
    #[arg(long)]
    pub p: Option<NumList>,
    /// Radii |x| at which to evaluate the Robin function.
    #[arg(long)]
    pub robin: Option<NumList>,
    /// Radii at which to compare the two evaluations of G̃.
    #[arg(long)]
    pub shells: Option<NumList>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

/// The resolved configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub n_list: Vec<u32>,
    pub p_list: Option<Vec<f64>>,
    pub eps_list: Option<Vec<f64>>,
    pub tol: f64,
    pub which: Option<Which>,
    pub robin: Option<Vec<f64>>,
    pub shells: Option<Vec<f64>>,
    pub format: Format,
    pub output_path: Option<String>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyIneq(_) => "verify-ineq",
            Command::Entire(_) => "entire",
            Command::Ball(_) => "ball",
            Command::Scan(_) => "scan",
            Command::Green(_) => "green",
        }
    }

    pub fn output(&self) -> &Output {
        match self {
            Command::VerifyIneq(a) => &a.output,
            Command::Entire(a) => &a.output,
            Command::Ball(a) => &a.output,
            Command::Scan(a) => &a.output,
            Command::Green(a) => &a.output,
        }
    }
}
