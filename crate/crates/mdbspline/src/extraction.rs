//! Extraction operators for multi-degree spline spaces.
//!
//! Continuity at a segment join is encoded as a constraint matrix built from
//! one-sided endpoint derivatives of the local B-splines. The operator is
//! assembled by peeling one constraint column at a time: each column carries a
//! single contiguous zero-sum block, whose sparsest left null-space is an
//! upper bidiagonal matrix with unit column sums. Multiplying these together
//! yields a banded operator with non-negative entries and unit column sums,
//! so the extracted basis keeps the local B-spline properties.

use crate::error::{Error, Result};
use crate::space::MdSpace;
use crate::sparse::{self, SparseMatrix};
use crate::bspline::Side;

const BLOCK_SUM_REL_TOL: f64 = 1e-10;
const DIVISION_GUARD_REL_TOL: f64 = 1e-14;

/// Smoothness constraints for one segment join: a `local_dimension x (kappa + 1)`
/// matrix whose column `k` pairs the order-`k` left-limit derivatives of the
/// left segment's trailing B-splines with the negated order-`k` right-limit
/// derivatives of the right segment's leading B-splines. Coefficient rows
/// annihilating every column describe functions that are `C^kappa` across the
/// join.
pub fn constraint_matrix(space: &MdSpace, join: usize) -> Result<SparseMatrix> {
    assert!(join + 1 < space.num_segments(), "join index out of range");
    let kappa = space.continuity()[join];
    if kappa < 0 {
        return Err(Error::NoConstraints { join });
    }
    let order = kappa as usize;
    let mu = space.mu();
    let left = space.segments()[join].endpoint_derivs(order, Side::Right)?;
    let right = space.segments()[join + 1].endpoint_derivs(order, Side::Left)?;
    let mut triplets = Vec::with_capacity((order + 1) * (order + 2));
    let left_base = mu[join + 1] - (order + 1);
    let right_base = mu[join + 1];
    for t in 0..=order {
        for r in 0..=order {
            triplets.push((left_base + t, r, left[(t, r)]));
            triplets.push((right_base + t, r, -right[(t, r)]));
        }
    }
    SparseMatrix::from_triplets(space.local_dimension(), order + 1, &triplets)
}

/// Wrap-around constraints coupling derivatives at the domain's right end
/// (last segment, positive block at the bottom) with derivatives at its left
/// end (first segment, negated block at the top).
pub fn periodic_constraint_matrix(space: &MdSpace) -> Result<SparseMatrix> {
    let order = match space.effective_periodic_order() {
        Some(k) => k as usize,
        None => {
            return Err(Error::UnsupportedPeriodic {
                reason: "space has no periodic order".into(),
            })
        }
    };
    if space.num_segments() < 2 {
        return Err(Error::UnsupportedPeriodic {
            reason: "periodic closure needs at least two segments".into(),
        });
    }
    let mu = space.mu();
    let last = space.num_segments() - 1;
    let bottom = space.segments()[last].endpoint_derivs(order, Side::Right)?;
    let top = space.segments()[0].endpoint_derivs(order, Side::Left)?;
    let bottom_base = mu[last + 1] - (order + 1);
    let mut triplets = Vec::with_capacity((order + 1) * (order + 2));
    for t in 0..=order {
        for r in 0..=order {
            triplets.push((bottom_base + t, r, bottom[(t, r)]));
            triplets.push((t, r, -top[(t, r)]));
        }
    }
    SparseMatrix::from_triplets(space.local_dimension(), order + 1, &triplets)
}

/// Sparsest left null-space of a constraint column.
///
/// `entries` are the stored entries of a length-`len` column, sorted by
/// index. They must form one contiguous block whose sum is zero; the result
/// is the `(len - 1) x len` upper bidiagonal matrix that combines adjacent
/// block entries and pads untouched indices with an identity shift. Every
/// column of the result sums to one.
pub fn nullspace_of_column(entries: &[(usize, f64)], len: usize) -> Result<SparseMatrix> {
    if entries.is_empty() {
        return Err(Error::ZeroVector);
    }
    if len < 2 {
        return Err(Error::NonContiguousBlock {
            reason: format!("column of length {len} cannot be reduced"),
        });
    }
    let i1 = entries[0].0;
    let i2 = entries[entries.len() - 1].0;
    if i2 >= len {
        return Err(Error::NonContiguousBlock {
            reason: format!("entry index {i2} outside column of length {len}"),
        });
    }
    if i2 - i1 + 1 != entries.len() {
        return Err(Error::NonContiguousBlock {
            reason: format!(
                "stored entries span rows {i1}..={i2} but only {} are present",
                entries.len()
            ),
        });
    }
    let block: Vec<f64> = entries.iter().map(|(_, v)| *v).collect();
    let scale = block.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::ZeroVector);
    }
    if let Some(pos) = block.iter().position(|v| v.abs() < DIVISION_GUARD_REL_TOL * scale) {
        return Err(Error::NonContiguousBlock {
            reason: format!(
                "entry at row {} is below the division guard relative to the block scale",
                i1 + pos
            ),
        });
    }
    let sum: f64 = block.iter().sum();
    if sum.abs() > BLOCK_SUM_REL_TOL * scale {
        return Err(Error::BlockSumNonzero { sum, scale });
    }

    let q = len;
    let value_at = |idx: usize| block[idx - i1];
    let mut diag = vec![0.0; q - 1];
    let mut upper = vec![0.0; q - 1];
    for d in diag.iter_mut().take(i1 + 1) {
        *d = 1.0;
    }
    // Peeling the recurrence upper_j = -(l_j / l_{j+1}) diag_j,
    // diag_{j+1} = 1 - upper_j telescopes to upper_j = -S_j / l_{j+1} and
    // diag_{j+1} = S_{j+1} / l_{j+1} with S the running block sum. Computing
    // the entries from compensated sums keeps them accurate even when the
    // block spans many orders of magnitude.
    let mut running = value_at(i1);
    let mut carry = 0.0f64;
    for j in i1..i2.saturating_sub(1) {
        let next = value_at(j + 1);
        upper[j] = -(running + carry) / next;
        let fresh = running + next;
        carry += if running.abs() >= next.abs() {
            (running - fresh) + next
        } else {
            (next - fresh) + running
        };
        running = fresh;
        diag[j + 1] = (running + carry) / next;
    }
    for u in upper.iter_mut().take(q - 1).skip(i2 - 1) {
        *u = 1.0;
    }
    let mut triplets = Vec::with_capacity(2 * (q - 1));
    for j in 0..q - 1 {
        triplets.push((j, j, diag[j]));
        triplets.push((j, j + 1, upper[j]));
    }
    SparseMatrix::from_triplets(q - 1, q, &triplets)
}

// Row rotation that makes a wrapped support block contiguous: the tail run
// ending at the last row is moved in front of the head run starting at row 0.
// Returns the downward shift, or None when the support is already contiguous.
fn wrap_shift(entries: &[(usize, f64)], len: usize) -> Result<Option<usize>> {
    if entries.is_empty() {
        return Err(Error::ZeroVector);
    }
    let first = entries[0].0;
    let last = entries[entries.len() - 1].0;
    if last - first + 1 == entries.len() {
        return Ok(None);
    }
    if first != 0 || last != len - 1 {
        return Err(Error::NonContiguousBlock {
            reason: "support has a gap but does not wrap around the ends".into(),
        });
    }
    let mut gaps = 0usize;
    let mut tail_start = None;
    for pair in entries.windows(2) {
        if pair[1].0 != pair[0].0 + 1 {
            gaps += 1;
            tail_start = Some(pair[1].0);
        }
    }
    if gaps != 1 {
        return Err(Error::NonContiguousBlock {
            reason: format!("support splits into {} runs", gaps + 1),
        });
    }
    Ok(Some(len - tail_start.unwrap()))
}

/// The extraction operator mapping a multi-degree space's basis onto the
/// concatenated local B-splines: a full-rank `dimension x local_dimension`
/// matrix with unit column sums, non-negative entries, and contiguous row
/// supports (circularly contiguous in the periodic case).
#[derive(Clone, Debug)]
pub struct ExtractionOperator {
    space: MdSpace,
    matrix: SparseMatrix,
    periodic: bool,
}

impl ExtractionOperator {
    /// Builds the operator for the space, applying the periodic wrap
    /// constraints when the space carries a periodic order.
    pub fn build(space: MdSpace) -> Result<Self> {
        match space.effective_periodic_order() {
            Some(_) => Self::build_periodic(space),
            None => Self::build_non_periodic(space),
        }
    }

    /// Operator for the interior joins only; fails on periodic spaces.
    pub fn build_non_periodic(space: MdSpace) -> Result<Self> {
        if space.is_periodic() {
            return Err(Error::UnsupportedPeriodic {
                reason: "use build or build_periodic for periodic spaces".into(),
            });
        }
        let matrix = reduce_interior_joins(&space)?;
        assert_eq!(matrix.n_rows(), space.dimension());
        Ok(Self {
            space,
            matrix,
            periodic: false,
        })
    }

    /// Operator with wrap-around smoothness. The interior operator is built
    /// first; each periodic constraint column is made contiguous by
    /// circularly shifting the working rows, reduced with the same
    /// null-space construction, and composed back in.
    pub fn build_periodic(space: MdSpace) -> Result<Self> {
        let order = match space.effective_periodic_order() {
            Some(k) => k as usize,
            None => return Self::build_non_periodic(space),
        };
        if space.num_segments() < 2 {
            return Err(Error::UnsupportedPeriodic {
                reason: "periodic closure needs at least two segments".into(),
            });
        }
        let mut matrix = reduce_interior_joins(&space)?;
        let wrap = periodic_constraint_matrix(&space)?;
        let mut remaining = sparse::spmm(&matrix, &wrap)?;
        for col in 0..=order {
            let column = remaining.column(col);
            if let Some(shift) = wrap_shift(&column, remaining.n_rows())? {
                matrix = matrix.rotate_rows_down(shift);
                remaining = remaining.rotate_rows_down(shift);
            }
            let column = remaining.column(col);
            let reducer = nullspace_of_column(&column, remaining.n_rows())?;
            matrix = sparse::spmm(&reducer, &matrix)?;
            remaining = sparse::spmm(&reducer, &remaining)?;
        }
        assert_eq!(matrix.n_rows(), space.dimension());
        Ok(Self {
            space,
            matrix,
            periodic: true,
        })
    }

    pub fn space(&self) -> &MdSpace {
        &self.space
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    /// Number of extracted basis functions (rows).
    pub fn dimension(&self) -> usize {
        self.matrix.n_rows()
    }

    /// Size of the underlying concatenated local basis (columns).
    pub fn local_dimension(&self) -> usize {
        self.matrix.n_cols()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.matrix.n_cols()];
        for (_, j, v) in self.matrix.iter() {
            sums[j] += v;
        }
        sums
    }

    pub fn min_entry(&self) -> f64 {
        self.matrix
            .iter()
            .map(|(_, _, v)| v)
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks the band structure of the stored entries: every row's support
    /// is one contiguous column range and the ranges move monotonically to
    /// the right across rows. Periodic operators may instead wrap a row's
    /// range around the ends, and are exempt from the ordering requirement.
    pub fn has_contiguous_row_supports(&self) -> bool {
        let cols = self.matrix.n_cols();
        let mut prev: Option<(usize, usize)> = None;
        (0..self.matrix.n_rows()).all(|i| {
            let (indices, _) = self.matrix.row(i);
            if indices.is_empty() {
                return false;
            }
            let (first, last) = (indices[0], indices[indices.len() - 1]);
            if last - first + 1 == indices.len() {
                if self.periodic {
                    return true;
                }
                let ordered = prev.is_none_or(|(f, l)| f <= first && l <= last);
                prev = Some((first, last));
                return ordered;
            }
            if !self.periodic {
                return false;
            }
            let gaps = indices
                .windows(2)
                .filter(|pair| pair[1] != pair[0] + 1)
                .count();
            gaps == 1 && first == 0 && last == cols - 1
        })
    }
}

// One pass of the extraction algorithm over the interior joins: start from
// the identity, and for each join multiply the constraint matrix through the
// operator built so far, then peel its columns one null-space at a time.
fn reduce_interior_joins(space: &MdSpace) -> Result<SparseMatrix> {
    let mut matrix = SparseMatrix::identity(space.local_dimension());
    for join in 0..space.num_segments().saturating_sub(1) {
        let kappa = space.continuity()[join];
        if kappa < 0 {
            continue;
        }
        let constraints = constraint_matrix(space, join)?;
        let mut remaining = sparse::spmm(&matrix, &constraints)?;
        for col in 0..=kappa as usize {
            let column = remaining.column(col);
            let reducer = nullspace_of_column(&column, remaining.n_rows())?;
            matrix = sparse::spmm(&reducer, &matrix)?;
            remaining = sparse::spmm(&reducer, &remaining)?;
        }
    }
    Ok(matrix)
}
