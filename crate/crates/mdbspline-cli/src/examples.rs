//! The `examples` subcommand: writes the bundled demonstration outputs.
//!
//! 1. Basis tables of the mixed-degree space (degrees 3, 4, 5) for join
//!    continuity 0, 1, and 2.
//! 2. The periodic basis table for the same segments with wrap order 3.
//! 3. A spline in the degree-(7, 2, 3) compression space: its coefficients,
//!    the converted degree-7 coefficients, and samples of both
//!    representations with their agreement verified.

use std::path::Path;
use std::sync::Arc;

use mdbspline::{presets, sample, ExtractionOperator, MdSpline};

use crate::{sampled_basis, write_basis_csv, write_coeffs_csv, CliError};

const SAMPLES: usize = 1000;
const AGREEMENT_TOL: f64 = 1e-10;

pub fn run(which: u8, out_dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    match which {
        1 => mixed_degree_bases(out_dir),
        2 => periodic_basis(out_dir),
        3 => conversion(out_dir),
        other => Err(CliError::Config(format!(
            "unknown example {other}; expected 1, 2, or 3"
        ))),
    }
}

fn build(space: mdbspline::MdSpace) -> Result<ExtractionOperator, CliError> {
    ExtractionOperator::build(space).map_err(|e| CliError::Math(e.to_string()))
}

fn mixed_degree_bases(out_dir: &Path) -> Result<(), CliError> {
    for kappa in 0..=2 {
        let space = presets::mixed_degree_space(kappa).map_err(|e| CliError::Math(e.to_string()))?;
        let op = build(space)?;
        let (grid, rows) = sampled_basis(&op, SAMPLES, 0)?;
        let path = out_dir.join(format!("basis_kappa{kappa}.csv"));
        write_basis_csv(&path, &grid, &rows)?;
    }
    Ok(())
}

fn periodic_basis(out_dir: &Path) -> Result<(), CliError> {
    let space = presets::periodic_mixed_degree_space().map_err(|e| CliError::Math(e.to_string()))?;
    let op = build(space)?;
    let (grid, rows) = sampled_basis(&op, SAMPLES, 0)?;
    write_basis_csv(&out_dir.join("periodic_basis.csv"), &grid, &rows)
}

fn conversion(out_dir: &Path) -> Result<(), CliError> {
    let source = Arc::new(build(
        presets::compression_source_space().map_err(|e| CliError::Math(e.to_string()))?,
    )?);
    let target = Arc::new(build(
        presets::compression_target_space().map_err(|e| CliError::Math(e.to_string()))?,
    )?);
    let coeffs = presets::compression_source_coeffs();
    let spline =
        MdSpline::new(Arc::clone(&source), coeffs.clone()).map_err(|e| CliError::Math(e.to_string()))?;
    let converted = spline
        .convert(Arc::clone(&target))
        .map_err(|e| CliError::Math(e.to_string()))?;

    write_coeffs_csv(&out_dir.join("mdb_coeffs.csv"), spline.coeffs())?;
    write_coeffs_csv(&out_dir.join("bspline_coeffs.csv"), converted.coeffs())?;

    let domain = source.space().domain();
    let grid = sample::uniform_grid(domain.start(), domain.end(), SAMPLES);
    let original = spline
        .eval_many(&grid, 0)
        .map_err(|e| CliError::Math(e.to_string()))?;
    let refined = converted
        .eval_many(&grid, 0)
        .map_err(|e| CliError::Math(e.to_string()))?;
    let worst = original
        .iter()
        .zip(&refined)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if worst > AGREEMENT_TOL {
        return Err(CliError::Math(format!(
            "representations disagree by {worst}, tolerance {AGREEMENT_TOL}"
        )));
    }

    let rows: Vec<Vec<f64>> = original
        .iter()
        .zip(&refined)
        .map(|(a, b)| vec![*a, *b])
        .collect();
    write_function_csv(&out_dir.join("function_samples.csv"), &grid, &rows)
}

fn write_function_csv(path: &Path, grid: &[f64], rows: &[Vec<f64>]) -> Result<(), CliError> {
    use std::io::Write;
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    let mut out = std::io::BufWriter::new(file);
    let write = |out: &mut std::io::BufWriter<std::fs::File>| -> std::io::Result<()> {
        writeln!(out, "xi,source,converted")?;
        for (xi, row) in grid.iter().zip(rows) {
            writeln!(
                out,
                "{},{},{}",
                mdbspline::sparse::format_f64(*xi),
                mdbspline::sparse::format_f64(row[0]),
                mdbspline::sparse::format_f64(row[1])
            )?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}
