//! Batch evaluation of extracted bases over point grids. Each output row is
//! computed independently, so the parallel and sequential paths return
//! bit-identical results; the `parallel` feature selects which one the
//! default entry point uses.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;
use crate::extraction::ExtractionOperator;
use crate::sparse::SparseMatrix;

/// `count >= 2` evenly spaced points covering `[a, b]` with both endpoints
/// included exactly.
pub fn uniform_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "a grid needs at least two points");
    let steps = (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == count - 1 {
                b
            } else {
                a + (b - a) * i as f64 / steps
            }
        })
        .collect()
}

/// Grid over the operator's whole domain.
pub fn domain_grid(op: &ExtractionOperator, count: usize) -> Vec<f64> {
    let domain = op.space().domain();
    uniform_grid(domain.start(), domain.end(), count)
}

fn basis_row(
    op: &ExtractionOperator,
    transposed: &SparseMatrix,
    xi: f64,
    deriv: usize,
) -> Result<Vec<f64>> {
    let window = op.space().eval_basis(xi, deriv)?;
    let mut out = vec![0.0; op.dimension()];
    for (t, v) in window.values.iter().enumerate() {
        if *v == 0.0 {
            continue;
        }
        let (rows, weights) = transposed.row(window.first + t);
        for (r, h) in rows.iter().zip(weights) {
            out[*r] += v * h;
        }
    }
    Ok(out)
}

/// Evaluates every extracted basis function at every point; row `s` holds
/// `[B_0(x_s), ..., B_{n-1}(x_s)]` (derivatives of order `deriv`).
pub fn sample_basis(
    op: &ExtractionOperator,
    points: &[f64],
    deriv: usize,
) -> Result<Vec<Vec<f64>>> {
    #[cfg(feature = "parallel")]
    {
        sample_basis_par(op, points, deriv)
    }
    #[cfg(not(feature = "parallel"))]
    {
        sample_basis_seq(op, points, deriv)
    }
}

/// Sequential evaluation; always available and used as the benchmark
/// baseline.
pub fn sample_basis_seq(
    op: &ExtractionOperator,
    points: &[f64],
    deriv: usize,
) -> Result<Vec<Vec<f64>>> {
    let transposed = op.matrix().transpose();
    points
        .iter()
        .map(|xi| basis_row(op, &transposed, *xi, deriv))
        .collect()
}

/// Rayon-parallel evaluation over the points.
#[cfg(feature = "parallel")]
pub fn sample_basis_par(
    op: &ExtractionOperator,
    points: &[f64],
    deriv: usize,
) -> Result<Vec<Vec<f64>>> {
    let transposed = op.matrix().transpose();
    points
        .par_iter()
        .map(|xi| basis_row(op, &transposed, *xi, deriv))
        .collect()
}
