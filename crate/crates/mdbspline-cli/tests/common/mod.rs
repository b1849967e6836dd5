//! Oracles and generators backing the acceptance suite, independent of the
//! library's own assembly and evaluation paths.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use mdbspline::bspline::{OpenKnotVector, Side};
use mdbspline::{ExtractionOperator, MdSpace, SparseMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense rank with a relative singular-value cutoff.
pub fn dense_rank(m: &DMatrix<f64>) -> usize {
    let scale = m.amax();
    if scale == 0.0 {
        return 0;
    }
    m.clone().rank(1e-10 * scale)
}

/// Random open knot vector with dyadic interior knots.
pub fn random_knot_vector(rng: &mut ChaCha8Rng, degree: usize, max_mult: usize) -> OpenKnotVector {
    let lengths = [1.0, 1.5, 2.0, 2.5, 3.0];
    let length = lengths[rng.random_range(0..lengths.len())];
    let n_interior = rng.random_range(0..=3);
    let mut positions: Vec<usize> = (1..8).collect();
    positions.shuffle(rng);
    let mut chosen = positions[..n_interior].to_vec();
    chosen.sort_unstable();
    let mut knots = vec![0.0; degree + 1];
    for pos in chosen {
        let value = length * pos as f64 / 8.0;
        let mult = rng.random_range(1..=max_mult.max(1));
        knots.extend(std::iter::repeat_n(value, mult));
    }
    knots.extend(std::iter::repeat_n(length, degree + 1));
    OpenKnotVector::new(knots, degree).unwrap()
}

/// Random multi-degree space. With `tight_continuity` every join order stays
/// strictly below the smaller adjacent degree, so one extra derivative order
/// remains evaluable on both sides of each join.
pub fn random_space(
    rng: &mut ChaCha8Rng,
    max_segments: usize,
    max_degree: usize,
    tight_continuity: bool,
) -> MdSpace {
    let n_s = rng.random_range(1..=max_segments);
    let degrees: Vec<usize> = (0..n_s).map(|_| rng.random_range(1..=max_degree)).collect();
    let segments: Vec<OpenKnotVector> = degrees
        .iter()
        .map(|p| random_knot_vector(rng, *p, (*p).max(1)))
        .collect();
    let continuity: Vec<i32> = (1..n_s)
        .map(|i| {
            let cap = degrees[i - 1].min(degrees[i]) as i32;
            let upper = if tight_continuity { cap - 1 } else { cap };
            rng.random_range(-1..=upper)
        })
        .collect();
    MdSpace::new(segments, continuity, 0.0, None).unwrap()
}

/// One-sided values (or derivatives) of every extracted basis function at
/// `xi`, contracted through the transposed operator.
pub fn basis_values_sided(
    op: &ExtractionOperator,
    transposed: &SparseMatrix,
    xi: f64,
    deriv: usize,
    side: Side,
) -> Vec<f64> {
    let window = op.space().eval_basis_sided(xi, deriv, side).unwrap();
    let mut out = vec![0.0; op.dimension()];
    for (t, v) in window.values.iter().enumerate() {
        let (rows, weights) = transposed.row(window.first + t);
        for (r, h) in rows.iter().zip(weights) {
            out[*r] += v * h;
        }
    }
    out
}

/// Zero-sum block whose running partial sums flip sign at every step, the
/// oscillation pattern of one-sided derivative constraint columns; the
/// null-space matrices of such blocks have non-negative entries.
pub fn alternating_zero_sum_block(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    assert!(len >= 2);
    let mut values = Vec::with_capacity(len);
    let mut sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let mut partial = sign * f64::exp(rng.random_range(-2.0..=2.0));
    values.push(partial);
    for step in 1..len {
        if step == len - 1 {
            values.push(-partial);
        } else {
            sign = -sign;
            let next = sign * f64::exp(rng.random_range(-2.0..=2.0));
            values.push(next - partial);
            partial = next;
        }
    }
    values
}
