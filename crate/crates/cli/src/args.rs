use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pbt_core::telemat::MatrixKind;

#[derive(Debug, Parser)]
#[command(name = "pbt", version, about = "Teleportation matrix, spectra and optimal fidelity of port-based teleportation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit M_F, the incidence matrix R or a Gram matrix G/H.
    Matrix {
        #[command(flatten)]
        cell: Cell,
        #[arg(long, value_parser = parse_kind, default_value = "MF")]
        kind: MatrixKind,
        #[command(flatten)]
        out: Output,
    },
    /// Spectral radius and Perron vector of M_F^d(N).
    Spectrum {
        #[command(flatten)]
        cell: Cell,
        #[command(flatten)]
        solver: Solver,
        /// Also report every eigenvalue.
        #[arg(long)]
        full: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Optimal, entangled-resource and lower-bound fidelities.
    Fidelity {
        #[command(flatten)]
        cell: Cell,
        #[command(flatten)]
        solver: Solver,
        #[command(flatten)]
        out: Output,
    },
    /// Coefficients of the optimal measurement, resource state and X_A.
    Povm {
        #[command(flatten)]
        cell: Cell,
        #[command(flatten)]
        solver: Solver,
        #[command(flatten)]
        out: Output,
    },
    /// Check the algebraic identities, or with --oracle the dense operator checks.
    Verify {
        #[command(flatten)]
        grid: Grid,
        /// Run the dense-operator checks (limited by PBT_ORACLE_CAP).
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        solver: Solver,
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Fidelity table over a grid of port counts and dimensions.
    Sweep {
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        solver: Solver,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Args)]
pub struct Cell {
    /// Number of ports N.
    #[arg(long)]
    pub ports: usize,
    /// Local dimension d.
    #[arg(long)]
    pub dim: usize,
}

#[derive(Debug, Args)]
pub struct Grid {
    /// Port count N or inclusive range a:b.
    #[arg(long, value_parser = parse_ports)]
    pub ports: PortRange,
    /// Single local dimension.
    #[arg(long, conflicts_with = "dims")]
    pub dim: Option<usize>,
    /// Comma-separated local dimensions.
    #[arg(long, value_delimiter = ',')]
    pub dims: Vec<usize>,
}

impl Grid {
    pub fn dims(&self) -> Vec<usize> {
        match self.dim {
            Some(d) => vec![d],
            None => self.dims.clone(),
        }
    }
}

#[derive(Debug, Args, Clone, Copy)]
pub struct Solver {
    /// Power-iteration stopping tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Power-iteration step limit.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (default: standard output).
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

impl Output {
    /// Explicit --format wins; otherwise a `.csv` output path selects CSV.
    pub fn format(&self) -> Format {
        self.format.unwrap_or_else(|| match self.output.as_deref().and_then(Path::extension) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortRange(pub RangeInclusive<usize>);

fn parse_ports(s: &str) -> Result<PortRange, String> {
    let parse = |x: &str| usize::from_str(x.trim()).map_err(|_| format!("invalid port count {x:?}"));
    match s.split_once(':') {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok(PortRange(a..=b))
        }
        None => {
            let n = parse(s)?;
            Ok(PortRange(n..=n))
        }
    }
}

fn parse_kind(s: &str) -> Result<MatrixKind, String> {
    s.parse().map_err(|e: pbt_core::Error| e.to_string())
}
