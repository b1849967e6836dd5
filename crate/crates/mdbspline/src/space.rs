//! Multi-degree spline spaces: a chain of open knot vectors glued at segment
//! joins with prescribed continuity orders, plus the concatenated local basis
//! that every smoother basis is extracted from.

use crate::bspline::{LocalEval, OpenKnotVector, Side};
use crate::error::{Error, Result};

/// The composed parameter interval. Segment `i` covers
/// `[breakpoints[i], breakpoints[i + 1]]`; consecutive segments share a
/// breakpoint, and each length equals the segment's basic interval length.
#[derive(Clone, Debug, PartialEq)]
pub struct ComposedDomain {
    breakpoints: Vec<f64>,
    segment_lengths: Vec<f64>,
}

impl ComposedDomain {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn segment_lengths(&self) -> &[f64] {
        &self.segment_lengths
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }
}

/// A validated multi-degree spline space.
///
/// Holds the segment knot vectors, the continuity orders at interior joins
/// (each in `-1..=min` of the adjacent degrees), an optional periodic wrap
/// order, the composed domain, and the cumulative local dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct MdSpace {
    segments: Vec<OpenKnotVector>,
    continuity: Vec<i32>,
    origin: f64,
    periodic_order: Option<i32>,
    domain: ComposedDomain,
    mu: Vec<usize>,
    dimension: usize,
}

impl MdSpace {
    pub fn new(
        segments: Vec<OpenKnotVector>,
        continuity: Vec<i32>,
        origin: f64,
        periodic_order: Option<i32>,
    ) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "segment count",
                left: 0,
                right: 1,
            });
        }
        if continuity.len() != segments.len() - 1 {
            return Err(Error::ContinuityCountMismatch {
                expected: segments.len() - 1,
                found: continuity.len(),
            });
        }
        for (join, &kappa) in continuity.iter().enumerate() {
            let max = segments[join].degree().min(segments[join + 1].degree()) as i32;
            if kappa < -1 || kappa > max {
                return Err(Error::InvalidContinuity { join, kappa, max });
            }
        }
        if let Some(order) = periodic_order {
            let max = segments[0]
                .degree()
                .min(segments[segments.len() - 1].degree()) as i32;
            if order < -1 || order > max {
                return Err(Error::PeriodicOrderTooHigh { order, max });
            }
        }

        let mut breakpoints = Vec::with_capacity(segments.len() + 1);
        let mut segment_lengths = Vec::with_capacity(segments.len());
        breakpoints.push(origin);
        for segment in &segments {
            let length = segment.length();
            segment_lengths.push(length);
            breakpoints.push(breakpoints.last().unwrap() + length);
        }
        let domain = ComposedDomain {
            breakpoints,
            segment_lengths,
        };

        let mut mu = Vec::with_capacity(segments.len() + 1);
        mu.push(0usize);
        for segment in &segments {
            mu.push(mu.last().unwrap() + segment.dimension());
        }

        let mut dim = segments[0].dimension() as i64;
        for i in 1..segments.len() {
            dim += segments[i].dimension() as i64 - continuity[i - 1] as i64 - 1;
        }
        if let Some(order) = periodic_order {
            if order >= 0 {
                dim -= order as i64 + 1;
            }
        }
        if dim <= 0 {
            return Err(Error::NonPositiveDimension { value: dim });
        }

        Ok(Self {
            segments,
            continuity,
            origin,
            periodic_order,
            domain,
            mu,
            dimension: dim as usize,
        })
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn segments(&self) -> &[OpenKnotVector] {
        &self.segments
    }

    pub fn continuity(&self) -> &[i32] {
        &self.continuity
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn periodic_order(&self) -> Option<i32> {
        self.periodic_order
    }

    /// Periodic order with `-1` normalized away: `Some(k)` only for `k >= 0`.
    pub fn effective_periodic_order(&self) -> Option<i32> {
        self.periodic_order.filter(|k| *k >= 0)
    }

    pub fn is_periodic(&self) -> bool {
        self.effective_periodic_order().is_some()
    }

    pub fn domain(&self) -> &ComposedDomain {
        &self.domain
    }

    pub fn breakpoints(&self) -> &[f64] {
        self.domain.breakpoints()
    }

    /// Cumulative local dimensions; entry `i` is the basis offset of segment
    /// `i` and the last entry is the concatenated basis size.
    pub fn mu(&self) -> &[usize] {
        &self.mu
    }

    /// Size of the concatenated local basis.
    pub fn local_dimension(&self) -> usize {
        *self.mu.last().unwrap()
    }

    pub fn local_dims(&self) -> Vec<usize> {
        self.segments.iter().map(|s| s.dimension()).collect()
    }

    /// Dimension of the multi-degree spline space.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    // Segment owning `xi` under the half-open rule: a join belongs to the
    // segment on its right, except the global right endpoint.
    fn owning_segment(&self, xi: f64) -> Result<usize> {
        let breakpoints = self.domain.breakpoints();
        let last = breakpoints.len() - 1;
        if !(xi >= breakpoints[0] && xi <= breakpoints[last]) {
            return Err(Error::OutOfDomain {
                x: xi,
                min: breakpoints[0],
                max: breakpoints[last],
            });
        }
        if xi >= breakpoints[last] {
            return Ok(self.segments.len() - 1);
        }
        Ok(breakpoints.partition_point(|b| *b <= xi) - 1)
    }

    fn segment_for(&self, xi: f64, side: Side) -> Result<usize> {
        let owner = self.owning_segment(xi)?;
        match side {
            Side::Right => Ok(owner),
            Side::Left => {
                if owner > 0 && xi == self.domain.breakpoints()[owner] {
                    Ok(owner - 1)
                } else {
                    Ok(owner)
                }
            }
        }
    }

    fn eval_in_segment(&self, segment: usize, xi: f64, deriv: usize, side: Side) -> Result<LocalEval> {
        let kv = &self.segments[segment];
        if deriv > kv.degree() {
            return Err(Error::OrderTooHigh {
                order: deriv,
                degree: kv.degree(),
            });
        }
        let (x1, x2) = kv.interval();
        let x = (x1 + (xi - self.domain.breakpoints()[segment])).clamp(x1, x2);
        let mut local = kv.eval_derivs_sided(x, deriv, side)?.pop().unwrap();
        local.first += self.mu[segment];
        Ok(local)
    }

    /// Values (or `deriv`-order one-sided derivatives) of the concatenated
    /// local basis at `xi`, as a window into a row of length
    /// [`MdSpace::local_dimension`]. Joins are owned by the right segment;
    /// the global right endpoint is evaluated as a left limit.
    pub fn eval_basis(&self, xi: f64, deriv: usize) -> Result<LocalEval> {
        let segment = self.segment_for(xi, Side::Right)?;
        self.eval_in_segment(segment, xi, deriv, Side::Right)
    }

    /// One-sided variant of [`MdSpace::eval_basis`]: with `Side::Left` a
    /// segment join is evaluated as the limit from the segment on its left,
    /// and a knot inside a segment as the limit from the knot's left span.
    pub fn eval_basis_sided(&self, xi: f64, deriv: usize, side: Side) -> Result<LocalEval> {
        let segment = self.segment_for(xi, side)?;
        self.eval_in_segment(segment, xi, deriv, side)
    }
}

/// Merges an equal-degree configuration into the knot vector whose B-spline
/// space coincides with the multi-degree space: each join knot appears with
/// multiplicity `degree - continuity`. Periodic spaces have no open
/// counterpart and are rejected.
pub fn merged_uniform_knot_vector(space: &MdSpace) -> Result<OpenKnotVector> {
    if space.is_periodic() {
        return Err(Error::UnsupportedPeriodic {
            reason: "a periodic space does not merge into an open knot vector".into(),
        });
    }
    let degree = space.segments()[0].degree();
    for segment in space.segments() {
        if segment.degree() != degree {
            return Err(Error::DimensionMismatch {
                context: "merged knot vector needs equal segment degrees",
                left: segment.degree(),
                right: degree,
            });
        }
    }
    let breakpoints = space.breakpoints();
    let mut knots = vec![breakpoints[0]; degree + 1];
    for (i, segment) in space.segments().iter().enumerate() {
        let (x1, _) = segment.interval();
        let offset = breakpoints[i] - x1;
        for (value, mult) in segment.interior_knots() {
            for _ in 0..mult {
                knots.push(value + offset);
            }
        }
        if i + 1 < space.num_segments() {
            let copies = degree as i64 - space.continuity()[i] as i64;
            for _ in 0..copies {
                knots.push(breakpoints[i + 1]);
            }
        }
    }
    knots.extend(std::iter::repeat_n(breakpoints[breakpoints.len() - 1], degree + 1));
    OpenKnotVector::new(knots, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn three_segment_space(kappa: i32) -> MdSpace {
        presets::mixed_degree_space(kappa).unwrap()
    }

    #[test]
    fn domain_accumulates_segment_lengths() {
        let space = three_segment_space(2);
        assert_eq!(space.breakpoints(), &[0.0, 2.0, 6.0, 9.0]);
        assert_eq!(space.domain().segment_lengths(), &[2.0, 4.0, 3.0]);
        assert_eq!(space.mu(), &[0, 4, 11, 17]);
    }

    #[test]
    fn single_segment_domain_is_shifted_interval() {
        let kv = OpenKnotVector::new(vec![1.0, 1.0, 3.0, 3.0], 1).unwrap();
        let space = MdSpace::new(vec![kv], vec![], 5.0, None).unwrap();
        assert_eq!(space.breakpoints(), &[5.0, 7.0]);
        assert_eq!(space.dimension(), 2);
    }

    #[test]
    fn origin_translates_breakpoints() {
        let base = three_segment_space(1);
        let shifted = MdSpace::new(
            base.segments().to_vec(),
            base.continuity().to_vec(),
            5.0,
            None,
        )
        .unwrap();
        for (a, b) in base.breakpoints().iter().zip(shifted.breakpoints()) {
            assert_eq!(a + 5.0, *b);
        }
        assert_eq!(
            base.domain().segment_lengths(),
            shifted.domain().segment_lengths()
        );
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(three_segment_space(0).dimension(), 15);
        assert_eq!(three_segment_space(1).dimension(), 13);
        assert_eq!(three_segment_space(2).dimension(), 11);
        assert_eq!(presets::compression_source_space().unwrap().dimension(), 10);
        assert_eq!(presets::periodic_mixed_degree_space().unwrap().dimension(), 7);
    }

    #[test]
    fn all_minus_one_continuity_gives_local_dimension() {
        let space = three_segment_space(-1);
        assert_eq!(space.dimension(), space.local_dimension());
    }

    #[test]
    fn rejects_invalid_continuity() {
        let base = three_segment_space(0);
        let err = MdSpace::new(base.segments().to_vec(), vec![4, 0], 0.0, None).unwrap_err();
        assert!(matches!(err, Error::InvalidContinuity { join: 0, kappa: 4, max: 3 }));
        let err = MdSpace::new(base.segments().to_vec(), vec![0], 0.0, None).unwrap_err();
        assert!(matches!(err, Error::ContinuityCountMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn rejects_periodic_order_above_end_degrees() {
        let base = three_segment_space(2);
        let err =
            MdSpace::new(base.segments().to_vec(), vec![2, 2], 0.0, Some(4)).unwrap_err();
        assert!(matches!(err, Error::PeriodicOrderTooHigh { order: 4, max: 3 }));
    }

    #[test]
    fn join_is_owned_by_the_right_segment() {
        let space = three_segment_space(2);
        let le = space.eval_basis(2.0, 0).unwrap();
        assert_eq!(le.first, space.mu()[1]);
        assert_eq!(le.values[0], 1.0);
        for v in &le.values[1..] {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn right_endpoint_is_a_left_limit() {
        let space = three_segment_space(2);
        let le = space.eval_basis(9.0, 0).unwrap();
        let dense = le.to_dense(space.local_dimension());
        assert_eq!(dense[space.local_dimension() - 1], 1.0);
        assert_eq!(dense.iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn join_derivative_order_is_capped_by_the_owner() {
        // At a join the owning (right) segment bounds the order, however high
        // the neighbor's degree is.
        let space = presets::compression_source_space().unwrap();
        assert!(space.eval_basis(1.0, 2).is_ok());
        assert!(matches!(
            space.eval_basis(1.0, 3),
            Err(Error::OrderTooHigh { order: 3, degree: 2 })
        ));
        assert!(space.eval_basis_sided(1.0, 7, Side::Left).is_ok());
    }

    #[test]
    fn sided_evaluation_splits_at_joins() {
        let space = three_segment_space(0);
        let left = space.eval_basis_sided(2.0, 0, Side::Left).unwrap();
        let right = space.eval_basis_sided(2.0, 0, Side::Right).unwrap();
        assert_eq!(left.first + left.values.len(), space.mu()[1]);
        assert_eq!(right.first, space.mu()[1]);
        assert_eq!(*left.values.last().unwrap(), 1.0);
        assert_eq!(right.values[0], 1.0);
    }

    #[test]
    fn local_basis_rows_sum_to_one() {
        let space = three_segment_space(1);
        let (a, b) = (space.domain().start(), space.domain().end());
        for i in 0..=500 {
            let xi = a + (b - a) * i as f64 / 500.0;
            let le = space.eval_basis(xi, 0).unwrap();
            let sum: f64 = le.values.iter().sum();
            assert!((sum - 1.0).abs() < 1e-13, "sum {sum} at {xi}");
            assert!(le.values.iter().all(|v| *v >= -1e-14));
        }
    }

    #[test]
    fn merged_vector_has_join_multiplicities() {
        let seg = |p: usize| {
            let mut knots = vec![0.0; p + 1];
            knots.extend(vec![1.0; p + 1]);
            OpenKnotVector::new(knots, p).unwrap()
        };
        let space = MdSpace::new(vec![seg(3), seg(3), seg(3)], vec![2, 0], 0.0, None).unwrap();
        let merged = merged_uniform_knot_vector(&space).unwrap();
        assert_eq!(merged.multiplicity(1.0), 1);
        assert_eq!(merged.multiplicity(2.0), 3);
        assert_eq!(merged.dimension(), space.dimension());
    }
}
