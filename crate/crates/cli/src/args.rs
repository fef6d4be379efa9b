use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

const UNITS: &str = "\
Lengths are in an arbitrary unit of the caller's choosing; energies are in
inverse length units (hbar = c = 1). Numbers are printed in shortest
round-trip form, which reproduces every double exactly.

Exit status: 0 on success, 1 for invalid arguments, 2 when a numerical
method fails (a JSON diagnostic is written to stderr).";

/// Casimir energies of a scalar field between concentric Dirichlet spheres.
#[derive(Debug, Parser, Serialize)]
#[command(name = "casimir", version, about, after_long_help = UNITS)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Relative tolerance for every quadrature.
    #[arg(
        long,
        global = true,
        env = "CASIMIR_QUAD_TOL",
        default_value_t = 1e-10,
        value_parser = parse_tol
    )]
    pub quad_tol: f64,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Full,
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    ClosedForm,
    Numeric,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Const,
    Linear,
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Lattice {
    Integer,
    Half,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Roots of the frequency equation for one angular index, next to the
    /// evenly spaced asymptotic spectrum.
    Roots {
        /// Inner radius.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Outer radius.
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 0)]
        ell: u32,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Per-ℓ deviation of the numerical roots from the asymptotic spectrum.
    SpectrumCheck {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 5)]
        ell_max: u32,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
    },
    /// Casimir energy with its leading term, corrections and per-area value.
    Energy {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, value_enum, default_value_t = Shape::Full)]
        variant: Shape,
        #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
        method: MethodChoice,
    },
    /// Per-area energy relative to the parallel-plate value as the gap closes.
    LimitScan {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Gap parameters d / sqrt(ab), comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.02")]
        eta_list: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Shape::Full)]
        variant: Shape,
        #[arg(long, value_enum, default_value_t = MethodChoice::ClosedForm)]
        method: MethodChoice,
    },
    /// Regularized sums of 1, x and x³ against their zeta values.
    AbelPlana {
        /// Summand; all three when omitted.
        #[arg(long, value_enum)]
        case: Option<Case>,
        /// Integer or half-integer lattice; both when omitted.
        #[arg(long, value_enum)]
        variant: Option<Lattice>,
    },
    /// Parity fits of the cross-product log-derivative and cutoff-integral
    /// checks showing that the high-ℓ energy contribution vanishes.
    VerifyEbar {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, value_delimiter = ',', default_value = "10,30")]
        ell_list: Vec<u32>,
        /// Explicit y values, comma separated. Defaults to 24 log-spaced
        /// points on [0.01, 0.1].
        #[arg(long, value_delimiter = ',')]
        y_grid: Option<Vec<f64>>,
    },
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (1e-14..=1e-2).contains(&v) {
        Ok(v)
    } else {
        Err(format!("tolerance must lie in [1e-14, 1e-2], got {v}"))
    }
}
