//! Multi-degree B-spline spaces and their extraction operators.
//!
//! A multi-degree spline is a smooth piecewise function whose pieces live in
//! B-spline spaces of possibly different degrees. This crate glues such
//! pieces together by building a sparse extraction operator: a banded,
//! non-negative matrix with unit column sums that expresses every basis
//! function of the smooth space as a combination of the local B-splines.
//! Evaluation, differentiation, periodic closure, and conversion between
//! nested spaces all reduce to that operator plus standard B-spline
//! algorithms.
//!
//! ```
//! use std::sync::Arc;
//! use mdbspline::{ExtractionOperator, MdSpace, MdSpline, OpenKnotVector};
//!
//! # fn main() -> mdbspline::Result<()> {
//! let quadratic = OpenKnotVector::new(vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0], 2)?;
//! let cubic = OpenKnotVector::new(vec![0.0, 0.0, 0.0, 0.0, 2.0, 2.0, 2.0, 2.0], 3)?;
//! let space = MdSpace::new(vec![quadratic, cubic], vec![1], 0.0, None)?;
//! assert_eq!(space.dimension(), 5);
//!
//! let op = Arc::new(ExtractionOperator::build(space)?);
//! let spline = MdSpline::new(op, vec![1.0, 0.5, 0.25, 0.5, 1.0])?;
//! assert!((spline.eval(0.0, 0)? - 1.0).abs() < 1e-13);
//! # Ok(())
//! # }
//! ```
//!
//! Batch evaluation over point grids runs on rayon when the default
//! `parallel` feature is enabled and falls back to a sequential loop
//! otherwise; both paths return identical results.

pub mod bspline;
pub mod error;
pub mod extraction;
pub mod presets;
pub mod sample;
pub mod space;
pub mod sparse;
pub mod spline;

pub use bspline::{LocalEval, OpenKnotVector, Side};
pub use error::{Error, Result};
pub use extraction::ExtractionOperator;
pub use space::{ComposedDomain, MdSpace};
pub use sparse::SparseMatrix;
pub use spline::MdSpline;
