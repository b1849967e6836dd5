//! Spline functions over a multi-degree space, represented by a coefficient
//! row against the extracted basis. Evaluation and differentiation transport
//! the coefficients onto the local B-splines once and then delegate to the
//! standard B-spline algorithms.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extraction::ExtractionOperator;
use crate::sparse::{self, SparseMatrix};
use crate::bspline;

/// A multi-degree spline `sum_j s_j B_j` with coefficients `s` against the
/// extracted basis of `op`. The local B-spline coefficients `s * H` are
/// computed at construction, so evaluation is read-only and threadsafe.
#[derive(Clone, Debug)]
pub struct MdSpline {
    op: Arc<ExtractionOperator>,
    coeffs: Vec<f64>,
    local: Vec<f64>,
}

impl MdSpline {
    pub fn new(op: Arc<ExtractionOperator>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != op.dimension() {
            return Err(Error::CoefficientCountMismatch {
                expected: op.dimension(),
                found: coeffs.len(),
            });
        }
        let local = op.matrix().left_mul(&coeffs);
        Ok(Self { op, coeffs, local })
    }

    pub fn operator(&self) -> &Arc<ExtractionOperator> {
        &self.op
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficients against the concatenated local B-spline basis.
    pub fn local_coeffs(&self) -> &[f64] {
        &self.local
    }

    /// Value (or `deriv`-order derivative) at `xi`. Joins are evaluated as
    /// right limits, the global right endpoint as a left limit.
    pub fn eval(&self, xi: f64, deriv: usize) -> Result<f64> {
        let window = self.op.space().eval_basis(xi, deriv)?;
        Ok(window
            .values
            .iter()
            .enumerate()
            .map(|(t, v)| v * self.local[window.first + t])
            .sum())
    }

    pub fn eval_many(&self, points: &[f64], deriv: usize) -> Result<Vec<f64>> {
        points.iter().map(|xi| self.eval(*xi, deriv)).collect()
    }

    /// Re-expresses the spline in `target`, which must be a superspace:
    /// same segment count, per-segment nested knot vectors, and continuity
    /// orders no larger than the source's. The result represents the same
    /// function; the least-squares step is residual-checked.
    pub fn convert(&self, target: Arc<ExtractionOperator>) -> Result<MdSpline> {
        self.convert_impl(target, false)
    }

    /// Like [`MdSpline::convert`] but allows targets with stricter
    /// continuity, returning the least-squares projection instead of failing.
    /// Per-segment knot nesting is still required.
    pub fn convert_lossy(&self, target: Arc<ExtractionOperator>) -> Result<MdSpline> {
        self.convert_impl(target, true)
    }

    fn convert_impl(&self, target: Arc<ExtractionOperator>, lossy: bool) -> Result<MdSpline> {
        let source_space = self.op.space();
        let target_space = target.space();
        if source_space.num_segments() != target_space.num_segments() {
            return Err(Error::SegmentCountMismatch {
                source_segments: source_space.num_segments(),
                target_segments: target_space.num_segments(),
            });
        }
        if source_space.origin() != target_space.origin() {
            return Err(Error::IntervalMismatch {
                expected_lo: source_space.domain().start(),
                expected_hi: source_space.domain().end(),
                found_lo: target_space.domain().start(),
                found_hi: target_space.domain().end(),
            });
        }
        if !lossy {
            for (join, (s, t)) in source_space
                .continuity()
                .iter()
                .zip(target_space.continuity())
                .enumerate()
            {
                if t > s {
                    return Err(Error::NotNested {
                        reason: format!(
                            "target continuity {t} at join {join} exceeds source continuity {s}"
                        ),
                    });
                }
            }
            let source_wrap = source_space.effective_periodic_order().unwrap_or(-1);
            let target_wrap = target_space.effective_periodic_order().unwrap_or(-1);
            if target_wrap > source_wrap {
                return Err(Error::NotNested {
                    reason: format!(
                        "target periodic order {target_wrap} exceeds source periodic order {source_wrap}"
                    ),
                });
            }
        }
        let refinements: Vec<SparseMatrix> = source_space
            .segments()
            .iter()
            .zip(target_space.segments())
            .map(|(old, new)| bspline::refinement_matrix(old, new))
            .collect::<Result<_>>()?;
        let blocks: Vec<&SparseMatrix> = refinements.iter().collect();
        let refined_local = sparse::block_diag(&blocks).left_mul(&self.local);
        let coeffs = if lossy {
            sparse::right_lsq_residual(&refined_local, target.matrix())?.0
        } else {
            sparse::right_lsq(&refined_local, target.matrix())?
        };
        MdSpline::new(target, coeffs)
    }
}
