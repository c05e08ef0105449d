//! `pbt`: command-line front end for `pbt-core`.
//!
//! Exit status: 0 on success, 1 for invalid input or usage, 2 when a
//! computation fails (non-convergence, oracle cap, failed check).

mod args;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use pbt_core::checks::{verify_identities, VerifyReport};
use pbt_core::oracle::{self, OracleConfig};
use pbt_core::protocol::{self, SweepRow};
use pbt_core::spectral::{self, PowerConfig, SpectralMethod};
use pbt_core::telemat::{self, MatrixKind};
use pbt_core::{Error, VERSION};
use rayon::prelude::*;
use serde::Serialize;

use args::{Cell, Cli, Command, Format, Grid, Output, Solver};

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Compute(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Compute(format!("I/O error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Matrix { cell, kind, out } => matrix(cell, kind, out),
        Command::Spectrum { cell, solver, full, out } => spectrum(cell, solver, full, out),
        Command::Fidelity { cell, solver, out } => fidelity(cell, solver, out),
        Command::Povm { cell, solver, out } => povm(cell, solver, out),
        Command::Verify {
            grid,
            oracle,
            solver,
            workers,
            out,
        } => verify(grid, oracle, solver, workers, out),
        Command::Sweep {
            grid,
            solver,
            workers,
            out,
        } => sweep(grid, solver, workers, out),
    }
}

fn check_cell(ports: usize, dim: usize) -> CliResult<()> {
    if ports == 0 {
        return Err(Failure::Usage("--ports must be ≥ 1".into()));
    }
    if dim < 2 {
        return Err(Failure::Usage(format!("--dim must be ≥ 2, got {dim}")));
    }
    Ok(())
}

fn power_config(solver: Solver) -> CliResult<PowerConfig> {
    if !(solver.tol > 0.0) {
        return Err(Failure::Usage(format!("--tol must be > 0, got {}", solver.tol)));
    }
    if solver.max_iter == 0 {
        return Err(Failure::Usage("--max-iter must be ≥ 1".into()));
    }
    Ok(PowerConfig {
        tol: solver.tol,
        max_iter: solver.max_iter,
    })
}

fn grid_cells(grid: &Grid) -> CliResult<Vec<(usize, usize)>> {
    let dims = grid.dims();
    if dims.is_empty() {
        return Err(Failure::Usage("give --dim or --dims".into()));
    }
    let cells: Vec<(usize, usize)> = grid.ports.0.clone().flat_map(|n| dims.iter().map(move |&d| (n, d))).collect();
    for &(n, d) in &cells {
        check_cell(n, d)?;
    }
    Ok(cells)
}

fn sink(out: &Output) -> CliResult<Box<dyn Write>> {
    Ok(match &out.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    version: &'static str,
    #[serde(flatten)]
    body: T,
}

fn write_json<T: Serialize>(out: &Output, body: T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&Envelope { version: VERSION, body })
        .map_err(|e| Failure::Compute(format!("JSON encoding failed: {e}")))?;
    let mut w = sink(out)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn write_csv(out: &Output, header: &[&str], rows: Vec<Vec<String>>) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    let csv_err = |e: csv::Error| Failure::Compute(format!("CSV encoding failed: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn matrix(cell: Cell, kind: MatrixKind, out: Output) -> CliResult<()> {
    check_cell(cell.ports, cell.dim)?;
    let m = telemat::build(kind, cell.ports, cell.dim)?;
    match out.format() {
        Format::Json => write_json(&out, m.to_json_value()),
        Format::Csv => {
            let mut w = sink(&out)?;
            m.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SpectrumReport {
    #[serde(rename = "N")]
    ports: usize,
    d: usize,
    #[serde(flatten)]
    result: spectral::SpectralResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvalues: Option<Vec<f64>>,
}

fn spectrum(cell: Cell, solver: Solver, full: bool, out: Output) -> CliResult<()> {
    check_cell(cell.ports, cell.dim)?;
    let config = power_config(solver)?;
    let result = spectral::spectral_radius(cell.ports, cell.dim, config)?;
    let eigenvalues = full.then(|| all_eigenvalues(cell.ports, cell.dim)).transpose()?;
    match out.format() {
        Format::Json => write_json(
            &out,
            SpectrumReport {
                ports: cell.ports,
                d: cell.dim,
                result,
                eigenvalues,
            },
        ),
        Format::Csv => {
            let rows = result
                .basis
                .iter()
                .zip(&result.perron)
                .map(|(mu, w)| vec![mu.to_string(), w.to_string()])
                .collect();
            write_csv(&out, &["diagram", "perron"], rows)
        }
    }
}

/// Every eigenvalue of the integer matrix, descending, by the cheapest
/// exact route available.
fn all_eigenvalues(ports: usize, dim: usize) -> CliResult<Vec<f64>> {
    let mut values: Vec<f64> = match protocol::method_for(ports, dim) {
        SpectralMethod::ClosedDgeN => spectral::spectrum_via_characters(ports)?
            .into_iter()
            .flat_map(|(k, mult)| std::iter::repeat_n(k as f64, mult))
            .collect(),
        SpectralMethod::ClosedD2 => spectral::closed_form_d2(ports),
        SpectralMethod::Power => {
            let m = telemat::teleportation_matrix(ports, dim)?;
            spectral::symmetric_eigen(&m.matrix().to_dense_f64()).values
        }
    };
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

#[derive(Serialize)]
struct FidelitySummary {
    #[serde(rename = "N")]
    ports: usize,
    d: usize,
    f_opt: f64,
    f_sqrt_ent: f64,
    f_lower: f64,
    method: String,
    radius: f64,
    iterations: usize,
}

fn fidelity(cell: Cell, solver: Solver, out: Output) -> CliResult<()> {
    check_cell(cell.ports, cell.dim)?;
    let config = power_config(solver)?;
    let opt = protocol::optimal_fidelity(cell.ports, cell.dim, config)?;
    let summary = FidelitySummary {
        ports: cell.ports,
        d: cell.dim,
        f_opt: opt.fidelity,
        f_sqrt_ent: protocol::sqrt_measurement_fidelity(cell.ports, cell.dim)?.fidelity,
        f_lower: protocol::lower_bound_fidelity(cell.ports, cell.dim)?.fidelity,
        method: opt.method,
        radius: opt.radius.unwrap_or(f64::NAN),
        iterations: opt.iterations.unwrap_or(0),
    };
    match out.format() {
        Format::Json => write_json(&out, summary),
        Format::Csv => write_csv(
            &out,
            &["N", "d", "f_lower", "f_sqrt_ent", "f_opt", "method", "radius", "iterations"],
            vec![vec![
                summary.ports.to_string(),
                summary.d.to_string(),
                summary.f_lower.to_string(),
                summary.f_sqrt_ent.to_string(),
                summary.f_opt.to_string(),
                summary.method,
                summary.radius.to_string(),
                summary.iterations.to_string(),
            ]],
        ),
    }
}

fn povm(cell: Cell, solver: Solver, out: Output) -> CliResult<()> {
    check_cell(cell.ports, cell.dim)?;
    let sol = protocol::optimal_solution(cell.ports, cell.dim, power_config(solver)?)?;
    match out.format() {
        Format::Json => write_json(&out, sol),
        Format::Csv => {
            let rows = sol
                .p_coeffs
                .iter()
                .map(|p| {
                    let k = sol.basis.iter().position(|mu| mu == &p.mu).expect("μ in basis");
                    vec![
                        p.alpha.to_string(),
                        p.mu.to_string(),
                        sol.v[k].to_string(),
                        p.p.to_string(),
                        sol.o_coeffs[k].to_string(),
                        sol.c_coeffs[k].to_string(),
                    ]
                })
                .collect();
            write_csv(&out, &["alpha", "mu", "v", "p", "o", "c"], rows)
        }
    }
}

#[derive(Serialize)]
struct VerifySummary {
    oracle: bool,
    pass: bool,
    results: Vec<VerifyReport>,
}

fn with_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> CliResult<T> {
    match workers {
        Some(0) => Err(Failure::Usage("--workers must be ≥ 1".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Failure::Compute(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
        None => Ok(job()),
    }
}

fn verify(grid: Grid, use_oracle: bool, solver: Solver, workers: Option<usize>, out: Output) -> CliResult<()> {
    let cells = grid_cells(&grid)?;
    let config = power_config(solver)?;
    let oracle_config = OracleConfig {
        power: config,
        ..OracleConfig::from_env()?
    };
    let results: Vec<pbt_core::Result<VerifyReport>> = with_pool(workers, || {
        cells
            .par_iter()
            .map(|&(n, d)| {
                if use_oracle {
                    oracle::verify(n, d, &oracle_config)
                } else {
                    verify_identities(n, d, config)
                }
            })
            .collect()
    })?;
    let results = results.into_iter().collect::<pbt_core::Result<Vec<_>>>()?;
    let pass = results.iter().all(|r| r.pass);
    let summary = VerifySummary {
        oracle: use_oracle,
        pass,
        results,
    };
    match out.format() {
        Format::Json => write_json(&out, &summary)?,
        Format::Csv => {
            let rows = summary
                .results
                .iter()
                .flat_map(|r| {
                    r.checks.iter().map(move |c| {
                        vec![
                            r.ports.to_string(),
                            r.d.to_string(),
                            c.name.clone(),
                            c.residual.to_string(),
                            c.tolerance.to_string(),
                            c.pass.to_string(),
                        ]
                    })
                })
                .collect();
            write_csv(&out, &["N", "d", "check", "residual", "tolerance", "pass"], rows)?;
        }
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Compute("one or more checks failed".into()))
    }
}

#[derive(Serialize)]
struct SweepReport {
    rows: Vec<SweepRow>,
}

fn sweep(grid: Grid, solver: Solver, workers: Option<usize>, out: Output) -> CliResult<()> {
    let dims = grid.dims();
    grid_cells(&grid)?;
    if workers == Some(0) {
        return Err(Failure::Usage("--workers must be ≥ 1".into()));
    }
    let rows = protocol::sweep(grid.ports.0.clone(), &dims, power_config(solver)?, workers)?;
    let failed: Vec<&SweepRow> = rows.iter().filter(|r| !r.is_ok()).collect();
    for r in &failed {
        eprintln!("warning: N={} d={}: {}", r.ports, r.d, opt(&r.error));
    }
    let any_failed = !failed.is_empty();
    match out.format() {
        Format::Json => write_json(&out, SweepReport { rows })?,
        Format::Csv => {
            let table = rows
                .iter()
                .map(|r| {
                    vec![
                        r.ports.to_string(),
                        r.d.to_string(),
                        opt(&r.f_lower),
                        opt(&r.f_sqrt_ent),
                        opt(&r.f_opt),
                        if r.is_ok() { opt(&r.method) } else { "error".into() },
                        opt(&r.radius),
                        opt(&r.iterations),
                    ]
                })
                .collect();
            write_csv(
                &out,
                &["N", "d", "f_lower", "f_sqrt_ent", "f_opt", "method", "radius", "iterations"],
                table,
            )?;
        }
    }
    if any_failed {
        Err(Failure::Compute("some sweep cells failed".into()))
    } else {
        Ok(())
    }
}

