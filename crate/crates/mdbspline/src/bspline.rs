//! Open knot vectors and uniform-degree B-spline machinery.
//!
//! Evaluation uses the iterative triangular recurrence over knot spans, so no
//! zero-denominator branches are needed at runtime. Query points equal to the
//! right endpoint are routed to the last non-empty span and evaluated as left
//! limits; everywhere else values and derivatives are right limits.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sparse::{self, SparseMatrix};

/// Domain endpoint selector for one-sided quantities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Values (or derivatives) of the `degree + 1` B-splines that can be nonzero
/// at a query point. `first` is the index of the first of them; every basis
/// function outside the window is exactly zero there.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalEval {
    pub first: usize,
    pub values: Vec<f64>,
}

impl LocalEval {
    /// Scatters the window into a dense vector of length `dim`.
    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for (offset, v) in self.values.iter().enumerate() {
            out[self.first + offset] = *v;
        }
        out
    }
}

/// A degree-`p` open knot vector: the first and last `p + 1` knots coincide
/// with the interval endpoints, interior multiplicities stay at most `p + 1`,
/// and the knots next to the end clusters are strictly inside the interval.
#[derive(Clone, Debug, PartialEq)]
pub struct OpenKnotVector {
    knots: Vec<f64>,
    degree: usize,
}

impl OpenKnotVector {
    /// Validates a knot list against the open-knot-vector invariants.
    pub fn new(knots: Vec<f64>, degree: usize) -> Result<Self> {
        let min = 2 * (degree + 1);
        if knots.len() < min {
            return Err(Error::TooShort {
                degree,
                len: knots.len(),
                min,
            });
        }
        if knots.iter().any(|u| !u.is_finite()) {
            return Err(Error::NotOpen {
                reason: "knots must be finite",
            });
        }
        for i in 1..knots.len() {
            if knots[i] < knots[i - 1] {
                return Err(Error::NonDecreasingViolated {
                    index: i,
                    value: knots[i],
                    prev: knots[i - 1],
                });
            }
        }
        let n = knots.len() - degree - 1;
        let x1 = knots[0];
        let x2 = knots[knots.len() - 1];
        if x1 >= x2 {
            return Err(Error::NotOpen {
                reason: "interval endpoints must satisfy x1 < x2",
            });
        }
        if knots[degree] != x1 || knots[n] != x2 {
            return Err(Error::NotOpen {
                reason: "end knots must repeat degree + 1 times",
            });
        }
        if knots[degree + 1] <= x1 {
            return Err(Error::NotOpen {
                reason: "left endpoint multiplicity exceeds degree + 1",
            });
        }
        if knots[n - 1] >= x2 {
            return Err(Error::NotOpen {
                reason: "right endpoint multiplicity exceeds degree + 1",
            });
        }
        let kv = Self { knots, degree };
        for (value, mult) in kv.distinct_knots() {
            if value != x1 && value != x2 && mult > degree + 1 {
                return Err(Error::MultiplicityExceeded {
                    knot: value,
                    multiplicity: mult,
                    max: degree + 1,
                });
            }
        }
        Ok(kv)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of B-splines over this knot vector.
    pub fn dimension(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Basic interval `[x1, x2]`.
    pub fn interval(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    pub fn length(&self) -> f64 {
        let (x1, x2) = self.interval();
        x2 - x1
    }

    /// Multiplicity of `value` among the stored knots (exact comparison).
    pub fn multiplicity(&self, value: f64) -> usize {
        self.knots.iter().filter(|u| **u == value).count()
    }

    /// Distinct knot values with multiplicities, in increasing order.
    pub fn distinct_knots(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &u in &self.knots {
            match out.last_mut() {
                Some((v, m)) if *v == u => *m += 1,
                _ => out.push((u, 1)),
            }
        }
        out
    }

    /// Distinct knots strictly inside the basic interval.
    pub fn interior_knots(&self) -> Vec<(f64, usize)> {
        let (x1, x2) = self.interval();
        self.distinct_knots()
            .into_iter()
            .filter(|(v, _)| *v > x1 && *v < x2)
            .collect()
    }

    /// Index `i` of the non-empty span with `u_i <= x < u_{i+1}`; the right
    /// endpoint maps to the last non-empty span.
    pub fn find_span(&self, x: f64) -> Result<usize> {
        let (x1, x2) = self.interval();
        // The negated form also routes NaN queries to the error branch.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(x >= x1 && x <= x2) {
            return Err(Error::OutOfDomain {
                x,
                min: x1,
                max: x2,
            });
        }
        let n = self.dimension();
        if x >= self.knots[n] {
            return Ok(n - 1);
        }
        let mut lo = self.degree;
        let mut hi = n - 1;
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.knots[mid] <= x {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Ok(lo)
    }

    /// Evaluates the local window of B-spline values at `x`.
    pub fn eval(&self, x: f64) -> Result<LocalEval> {
        let span = self.find_span(x)?;
        let p = self.degree;
        let mut values = vec![0.0; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        values[0] = 1.0;
        for j in 1..=p {
            left[j] = x - self.knots[span + 1 - j];
            right[j] = self.knots[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                let temp = values[r] / (right[r + 1] + left[j - r]);
                values[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            values[j] = saved;
        }
        Ok(LocalEval {
            first: span - p,
            values,
        })
    }

    /// Evaluates all derivative orders `0..=k` of the local window at `x`.
    ///
    /// Entry `r` of the result holds the order-`r` derivatives. They are
    /// right limits except at the right endpoint, where left limits are
    /// returned.
    pub fn eval_derivs(&self, x: f64, k: usize) -> Result<Vec<LocalEval>> {
        self.eval_derivs_sided(x, k, Side::Right)
    }

    /// One-sided variant of [`OpenKnotVector::eval_derivs`]: with
    /// `Side::Left`, a query at a knot is routed to the span on its left, so
    /// the returned values are left limits. Off-knot queries and queries at
    /// the left endpoint are unaffected.
    pub fn eval_derivs_sided(&self, x: f64, k: usize, side: Side) -> Result<Vec<LocalEval>> {
        let p = self.degree;
        if k > p {
            return Err(Error::OrderTooHigh {
                order: k,
                degree: p,
            });
        }
        let mut span = self.find_span(x)?;
        if side == Side::Left {
            let first_at = self.knots.partition_point(|u| *u < x);
            if first_at > 0 && first_at < self.knots.len() && self.knots[first_at] == x {
                span = first_at - 1;
            }
        }
        let ders = self.ders_basis(span, x, k);
        Ok(ders
            .into_iter()
            .map(|values| LocalEval {
                first: span - p,
                values,
            })
            .collect())
    }

    // Triangular-table derivative scheme; assumes `span` is non-empty and
    // contains x, so all intermediate knot differences are positive.
    fn ders_basis(&self, span: usize, x: f64, k: usize) -> Vec<Vec<f64>> {
        let p = self.degree;
        let u = &self.knots;
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        ndu[0][0] = 1.0;
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        for j in 1..=p {
            left[j] = x - u[span + 1 - j];
            right[j] = u[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }
        let mut ders = vec![vec![0.0; p + 1]; k + 1];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let mut prev = vec![0.0; p + 1];
        let mut curr = vec![0.0; p + 1];
        for r in 0..=p {
            prev.iter_mut().for_each(|v| *v = 0.0);
            prev[0] = 1.0;
            for order in 1..=k {
                curr.iter_mut().for_each(|v| *v = 0.0);
                let mut d = 0.0;
                let rk = r as i64 - order as i64;
                let pk = (p - order) as i64;
                if r >= order {
                    curr[0] = prev[0] / ndu[(pk + 1) as usize][rk as usize];
                    d = curr[0] * ndu[rk as usize][pk as usize];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if r as i64 - 1 <= pk { order - 1 } else { p - r };
                for j in j1..=j2 {
                    curr[j] = (prev[j] - prev[j - 1]) / ndu[(pk + 1) as usize][(rk + j as i64) as usize];
                    d += curr[j] * ndu[(rk + j as i64) as usize][pk as usize];
                }
                if r as i64 <= pk {
                    curr[order] = -prev[order - 1] / ndu[(pk + 1) as usize][r];
                    d += curr[order] * ndu[r][pk as usize];
                }
                ders[order][r] = d;
                std::mem::swap(&mut prev, &mut curr);
            }
        }
        let mut factor = p as f64;
        for (order, row) in ders.iter_mut().enumerate().skip(1) {
            for value in row.iter_mut() {
                *value *= factor;
            }
            factor *= (p - order) as f64;
        }
        ders
    }

    /// Derivatives of the first (`Left`) or last (`Right`) `k + 1` B-splines
    /// at the corresponding interval endpoint, through order `k`.
    ///
    /// Entry `(j, r)` holds the order-`r` derivative of the `j`-th basis
    /// function in the selected group. Only those functions can contribute at
    /// the endpoint, which gives the matrix its triangular zero pattern. The
    /// values come from the coefficient recursion for B-spline derivatives,
    /// independent of [`OpenKnotVector::eval_derivs`].
    pub fn endpoint_derivs(&self, k: usize, side: Side) -> Result<DMatrix<f64>> {
        let p = self.degree;
        if k > p {
            return Err(Error::OrderTooHigh {
                order: k,
                degree: p,
            });
        }
        let n = self.dimension();
        let u = &self.knots;
        let m = k + 1;
        let mut out = DMatrix::zeros(m, m);
        let mut coeffs = vec![0.0; m + 1];
        for j in 0..m {
            coeffs.iter_mut().for_each(|v| *v = 0.0);
            coeffs[j] = 1.0;
            match side {
                Side::Left => {
                    out[(j, 0)] = coeffs[0];
                    for r in 1..=k {
                        for a in 0..=(k - r) {
                            let denom = u[a + p + 1] - u[a + r];
                            let alpha = (p - r + 1) as f64 / denom;
                            coeffs[a] = alpha * (coeffs[a + 1] - coeffs[a]);
                        }
                        out[(j, r)] = coeffs[0];
                    }
                }
                Side::Right => {
                    out[(j, 0)] = coeffs[k];
                    for r in 1..=k {
                        for t in 0..=(k - r) {
                            let a = n - 1 - k + t;
                            let denom = u[a + p + 1] - u[a + r];
                            let alpha = (p - r + 1) as f64 / denom;
                            coeffs[t] = alpha * (coeffs[t + 1] - coeffs[t]);
                        }
                        out[(j, r)] = coeffs[k - r];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Single-knot insertion matrix. For any coefficient row `f`, `f * R`
/// represents the same spline over the refined knot vector; every column of
/// `R` holds at most two nonzeros.
pub fn knot_insertion_matrix(
    kv: &OpenKnotVector,
    new_knot: f64,
) -> Result<(SparseMatrix, OpenKnotVector)> {
    let (x1, x2) = kv.interval();
    if !(new_knot > x1 && new_knot < x2) {
        return Err(Error::OutOfDomain {
            x: new_knot,
            min: x1,
            max: x2,
        });
    }
    let p = kv.degree();
    let n = kv.dimension();
    let mult = kv.multiplicity(new_knot);
    if mult + 1 > p + 1 {
        return Err(Error::MultiplicityExceeded {
            knot: new_knot,
            multiplicity: mult + 1,
            max: p + 1,
        });
    }
    let span = kv.find_span(new_knot)?;
    let u = kv.knots();
    let mut triplets = Vec::with_capacity(2 * n);
    for j in 0..=span - p {
        triplets.push((j, j, 1.0));
    }
    for j in span - p + 1..=span {
        let alpha = (new_knot - u[j]) / (u[j + p] - u[j]);
        triplets.push((j, j, alpha));
        triplets.push((j - 1, j, 1.0 - alpha));
    }
    for j in span + 1..=n {
        triplets.push((j - 1, j, 1.0));
    }
    let matrix = SparseMatrix::from_triplets(n, n + 1, &triplets)?;
    let mut knots = u.to_vec();
    knots.insert(span + 1, new_knot);
    let refined = OpenKnotVector::new(knots, p)?;
    Ok((matrix, refined))
}

/// Inserts knots until every distinct interior knot has multiplicity
/// `degree + 1`, fully decoupling the polynomial pieces. Returns the combined
/// coefficient map and the decomposed knot vector.
pub fn bezier_decomposition(kv: &OpenKnotVector) -> Result<(SparseMatrix, OpenKnotVector)> {
    let p = kv.degree();
    let mut matrix = SparseMatrix::identity(kv.dimension());
    let mut current = kv.clone();
    for (value, _) in kv.interior_knots() {
        while current.multiplicity(value) < p + 1 {
            let (step, refined) = knot_insertion_matrix(&current, value)?;
            matrix = sparse::spmm(&matrix, &step)?;
            current = refined;
        }
    }
    Ok((matrix, current))
}

// Bernstein one-degree elevation blocks for a fully decomposed knot vector.
fn bernstein_elevation_blocks(degree: usize, segments: usize) -> Result<SparseMatrix> {
    let p1 = degree + 1;
    let mut triplets = Vec::with_capacity(segments * 2 * (p1 + 1));
    for s in 0..segments {
        let row0 = s * p1;
        let col0 = s * (p1 + 1);
        for k in 0..=p1 {
            let w = k as f64 / p1 as f64;
            if k >= 1 {
                triplets.push((row0 + k - 1, col0 + k, w));
            }
            if k <= degree {
                triplets.push((row0 + k, col0 + k, 1.0 - w));
            }
        }
    }
    SparseMatrix::from_triplets(segments * p1, segments * (p1 + 1), &triplets)
}

/// One-degree elevation matrix. The target knot vector has degree `p + 1`
/// and every distinct knot's multiplicity raised by one; `f * R` reproduces
/// the same piecewise polynomial.
///
/// Pieces are decoupled by knot insertion, elevated per segment with the
/// Bernstein convex-combination formula, and mapped back onto the target
/// basis through a residual-checked right-inverse solve against the target's
/// own decomposition operator.
pub fn degree_elevation_matrix(kv: &OpenKnotVector) -> Result<(SparseMatrix, OpenKnotVector)> {
    let p = kv.degree();
    let (decompose, decomposed) = bezier_decomposition(kv)?;
    let segments = decomposed.distinct_knots().len() - 1;
    let elevate = bernstein_elevation_blocks(p, segments)?;

    let mut target_knots = Vec::with_capacity(kv.knots().len() + segments + 2);
    for (value, mult) in kv.distinct_knots() {
        for _ in 0..mult + 1 {
            target_knots.push(value);
        }
    }
    let target = OpenKnotVector::new(target_knots, p + 1)?;

    let (target_decompose, target_decomposed) = bezier_decomposition(&target)?;
    debug_assert_eq!(target_decomposed.dimension(), segments * (p + 2));

    let elevated = sparse::spmm(&decompose, &elevate)?;
    let matrix = sparse::right_lsq_matrix(&elevated, &target_decompose)?;
    Ok((matrix, target))
}

/// Coefficient map from `kv_old` onto the nested superspace `kv_new`,
/// composed from one-degree elevations followed by single-knot insertions.
pub fn refinement_matrix(kv_old: &OpenKnotVector, kv_new: &OpenKnotVector) -> Result<SparseMatrix> {
    if kv_old == kv_new {
        return Ok(SparseMatrix::identity(kv_old.dimension()));
    }
    let (old_lo, old_hi) = kv_old.interval();
    let (new_lo, new_hi) = kv_new.interval();
    if old_lo != new_lo || old_hi != new_hi {
        return Err(Error::IntervalMismatch {
            expected_lo: old_lo,
            expected_hi: old_hi,
            found_lo: new_lo,
            found_hi: new_hi,
        });
    }
    if kv_new.degree() < kv_old.degree() {
        return Err(Error::NotNested {
            reason: format!(
                "target degree {} is below source degree {}",
                kv_new.degree(),
                kv_old.degree()
            ),
        });
    }
    let raise = kv_new.degree() - kv_old.degree();
    for (value, mult) in kv_old.interior_knots() {
        if kv_new.multiplicity(value) < mult + raise {
            return Err(Error::NotNested {
                reason: format!(
                    "knot {value} needs multiplicity at least {} in the target, found {}",
                    mult + raise,
                    kv_new.multiplicity(value)
                ),
            });
        }
    }
    let mut matrix = SparseMatrix::identity(kv_old.dimension());
    let mut current = kv_old.clone();
    for _ in 0..raise {
        let (step, elevated) = degree_elevation_matrix(&current)?;
        matrix = sparse::spmm(&matrix, &step)?;
        current = elevated;
    }
    for (value, target_mult) in kv_new.interior_knots() {
        while current.multiplicity(value) < target_mult {
            let (step, refined) = knot_insertion_matrix(&current, value)?;
            matrix = sparse::spmm(&matrix, &step)?;
            current = refined;
        }
    }
    debug_assert_eq!(current.knots(), kv_new.knots());
    Ok(matrix)
}
