//! Command line front end: space dimensions, sampled bases, extraction
//! operator dumps, coefficient conversion, and bundled example outputs.
//!
//! Exit codes: 0 success, 2 configuration or validation error, 3 I/O error,
//! 4 mathematical precondition failure.

mod config;
mod examples;

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use mdbspline::sparse::{format_f64, write_matrix_market_file};
use mdbspline::{sample, ExtractionOperator, MdSpline};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Math(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
            CliError::Math(msg) => write!(f, "computation error: {msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Math(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mdbspline",
    version,
    about = "Multi-degree B-spline spaces: dimensions, bases, extraction operators, conversions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the space dimension, per-segment dimensions, and breakpoints
    Dim {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sample the extracted basis over a uniform grid and write a CSV table
    Basis {
        #[arg(long)]
        config: PathBuf,
        /// Number of grid points, both domain endpoints included
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Derivative order to sample
        #[arg(long, default_value_t = 0)]
        deriv: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the extraction operator in Matrix Market coordinate format
    Extract {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-express a coefficient vector in a nested target space
    Convert {
        /// Source space configuration
        #[arg(long)]
        config: PathBuf,
        /// Target space configuration
        #[arg(long)]
        target: PathBuf,
        /// CSV file holding one row of source coefficients
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Accept non-superspace targets and return the least-squares fit
        #[arg(long)]
        allow_lossy: bool,
    },
    /// Write the bundled demonstration outputs (1, 2, or 3)
    Examples {
        which: u8,
        /// Output directory, created if missing
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Dim { config } => cmd_dim(&config),
        Command::Basis {
            config,
            samples,
            deriv,
            out,
        } => cmd_basis(&config, samples, deriv, &out),
        Command::Extract { config, out } => cmd_extract(&config, &out),
        Command::Convert {
            config,
            target,
            coeffs,
            out,
            allow_lossy,
        } => cmd_convert(&config, &target, &coeffs, &out, allow_lossy),
        Command::Examples { which, out } => examples::run(which, &out),
    }
}

fn build_operator(space: mdbspline::MdSpace) -> Result<ExtractionOperator, CliError> {
    ExtractionOperator::build(space).map_err(|e| CliError::Math(e.to_string()))
}

fn cmd_dim(config: &Path) -> Result<(), CliError> {
    let space = config::load_space(config)?;
    let dims: Vec<String> = space.local_dims().iter().map(|d| d.to_string()).collect();
    let breakpoints: Vec<String> = space.breakpoints().iter().map(|b| b.to_string()).collect();
    println!("dimension={}", space.dimension());
    println!("local_dims={}", dims.join(","));
    println!("breakpoints={}", breakpoints.join(","));
    Ok(())
}

fn create_out(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))
}

pub(crate) fn write_basis_csv(
    path: &Path,
    grid: &[f64],
    rows: &[Vec<f64>],
) -> Result<(), CliError> {
    let mut out = create_out(path)?;
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        let n = rows.first().map_or(0, Vec::len);
        write!(out, "xi")?;
        for j in 1..=n {
            write!(out, ",B{j}")?;
        }
        writeln!(out)?;
        for (xi, row) in grid.iter().zip(rows) {
            write!(out, "{}", format_f64(*xi))?;
            for v in row {
                write!(out, ",{}", format_f64(*v))?;
            }
            writeln!(out)?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub(crate) fn sampled_basis(
    op: &ExtractionOperator,
    samples: usize,
    deriv: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), CliError> {
    if samples < 2 {
        return Err(CliError::Config(format!(
            "--samples must be at least 2, got {samples}"
        )));
    }
    let grid = sample::domain_grid(op, samples);
    let rows = sample::sample_basis(op, &grid, deriv)
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok((grid, rows))
}

fn cmd_basis(config: &Path, samples: usize, deriv: usize, out: &Path) -> Result<(), CliError> {
    let space = config::load_space(config)?;
    let op = build_operator(space)?;
    let (grid, rows) = sampled_basis(&op, samples, deriv)?;
    write_basis_csv(out, &grid, &rows)
}

fn cmd_extract(config: &Path, out: &Path) -> Result<(), CliError> {
    let space = config::load_space(config)?;
    let op = build_operator(space)?;
    write_matrix_market_file(op.matrix(), out)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))
}

pub(crate) fn read_coeffs_csv(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let line = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| CliError::Config(format!("{}: no coefficient row", path.display())))?;
    line.split(',')
        .map(|field| {
            field.trim().parse::<f64>().map_err(|e| {
                CliError::Config(format!("{}: bad coefficient {field:?}: {e}", path.display()))
            })
        })
        .collect()
}

pub(crate) fn write_coeffs_csv(path: &Path, coeffs: &[f64]) -> Result<(), CliError> {
    let mut out = create_out(path)?;
    let row: Vec<String> = coeffs.iter().map(|c| format_f64(*c)).collect();
    writeln!(out, "{}", row.join(","))
        .and_then(|()| out.flush())
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn cmd_convert(
    config: &Path,
    target: &Path,
    coeffs: &Path,
    out: &Path,
    allow_lossy: bool,
) -> Result<(), CliError> {
    let source_space = config::load_space(config)?;
    let target_space = config::load_space(target)?;
    let values = read_coeffs_csv(coeffs)?;
    if values.len() != source_space.dimension() {
        return Err(CliError::Config(format!(
            "coefficient count {} does not match the source dimension {}",
            values.len(),
            source_space.dimension()
        )));
    }
    let source_op = Arc::new(build_operator(source_space)?);
    let target_op = Arc::new(build_operator(target_space)?);
    let spline =
        MdSpline::new(source_op, values).map_err(|e| CliError::Math(e.to_string()))?;
    let converted = if allow_lossy {
        spline.convert_lossy(target_op)
    } else {
        spline.convert(target_op)
    }
    .map_err(|e| CliError::Math(e.to_string()))?;
    write_coeffs_csv(out, converted.coeffs())
}
