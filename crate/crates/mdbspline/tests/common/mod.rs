//! Shared oracles and generators for the integration tests. Everything here
//! is independent of the library's evaluation and assembly paths.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use mdbspline::bspline::{OpenKnotVector, Side};
use mdbspline::{ExtractionOperator, MdSpace, SparseMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Literal two-term recursion for a single B-spline value, starting from the
/// degree-zero indicator functions. Fractions with zero denominator drop out.
pub fn recursive_bspline(knots: &[f64], j: usize, p: usize, x: f64) -> f64 {
    if p == 0 {
        return if knots[j] <= x && x < knots[j + 1] {
            1.0
        } else {
            0.0
        };
    }
    let mut value = 0.0;
    let d1 = knots[j + p] - knots[j];
    if d1 != 0.0 {
        value += (x - knots[j]) / d1 * recursive_bspline(knots, j, p - 1, x);
    }
    let d2 = knots[j + p + 1] - knots[j + 1];
    if d2 != 0.0 {
        value += (knots[j + p + 1] - x) / d2 * recursive_bspline(knots, j + 1, p - 1, x);
    }
    value
}

/// Order-`k` derivative of `sum_j coeffs[j] b_j` at `x`, computed by
/// recursing the coefficients down to degree `p - k` and evaluating over the
/// stripped knot vector.
pub fn derivative_by_coefficient_recursion(
    kv: &OpenKnotVector,
    coeffs: &[f64],
    k: usize,
    x: f64,
) -> f64 {
    let p = kv.degree();
    let u = kv.knots();
    let n = kv.dimension();
    let mut c = coeffs.to_vec();
    for r in 1..=k {
        let mut next = vec![0.0; n - r];
        for (j, slot) in next.iter_mut().enumerate() {
            let denom = u[j + p + 1] - u[j + r];
            if denom != 0.0 {
                *slot = (p - r + 1) as f64 / denom * (c[j + 1] - c[j]);
            }
        }
        c = next;
    }
    let reduced = OpenKnotVector::new(u[k..u.len() - k].to_vec(), p - k).unwrap();
    let le = reduced.eval(x).unwrap();
    le.values
        .iter()
        .enumerate()
        .map(|(t, v)| v * c[le.first + t])
        .sum()
}

/// Dense rank with a relative singular-value cutoff.
pub fn dense_rank(m: &DMatrix<f64>) -> usize {
    let scale = m.amax();
    if scale == 0.0 {
        return 0;
    }
    m.clone().rank(1e-10 * scale)
}

pub fn from_dense(m: &DMatrix<f64>) -> SparseMatrix {
    let mut triplets = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)] != 0.0 {
                triplets.push((i, j, m[(i, j)]));
            }
        }
    }
    SparseMatrix::from_triplets(m.nrows(), m.ncols(), &triplets).unwrap()
}

/// Random open knot vector with dyadic interior knots. Interior
/// multiplicities stay at or below `max_mult`.
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
/// remains evaluable on both sides.
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
/// oscillation pattern of one-sided derivative constraint columns. The
/// resulting null-space matrices have non-negative entries. Partial-sum
/// magnitudes are drawn from a bounded range so no entry decays toward the
/// division guard, however long the block.
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

/// Zero-sum block with no sign structure; every entry stays comfortably
/// above the division guard.
pub fn general_zero_sum_block(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    assert!(len >= 2);
    loop {
        let mut values: Vec<f64> = (0..len - 1)
            .map(|_| {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                sign * rng.random_range(0.1..=1.1)
            })
            .collect();
        let closer = -values.iter().sum::<f64>();
        if closer.abs() >= 0.05 {
            values.push(closer);
            return values;
        }
    }
}
