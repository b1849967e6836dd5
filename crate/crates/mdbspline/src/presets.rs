//! Ready-made demonstration spaces used by the CLI's `examples` command and
//! throughout the test suite.

use crate::bspline::OpenKnotVector;
use crate::error::Result;
use crate::space::MdSpace;

fn kv(knots: &[f64], degree: usize) -> Result<OpenKnotVector> {
    OpenKnotVector::new(knots.to_vec(), degree)
}

fn mixed_degree_segments() -> Result<Vec<OpenKnotVector>> {
    Ok(vec![
        kv(&[0.0, 0.0, 0.0, 0.0, 2.0, 2.0, 2.0, 2.0], 3)?,
        kv(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.5, 1.5, 4.0, 4.0, 4.0, 4.0, 4.0], 4)?,
        kv(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.0, 3.0, 3.0, 3.0, 3.0, 3.0], 5)?,
    ])
}

/// Three segments of degrees 3, 4, and 5 over `[0, 9]` with joins at 2 and 6,
/// glued with the same continuity order `kappa` at both joins.
pub fn mixed_degree_space(kappa: i32) -> Result<MdSpace> {
    MdSpace::new(mixed_degree_segments()?, vec![kappa, kappa], 0.0, None)
}

/// The mixed-degree space with `C^2` joins closed periodically with wrap
/// order 3.
pub fn periodic_mixed_degree_space() -> Result<MdSpace> {
    MdSpace::new(mixed_degree_segments()?, vec![2, 2], 0.0, Some(3))
}

/// A compact space of degrees 7, 2, and 3 over `[0, 3]` with continuity
/// `(2, 1)`; low degrees where the represented function is simple.
pub fn compression_source_space() -> Result<MdSpace> {
    let segments = vec![
        kv(
            &[
                0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0,
            ],
            7,
        )?,
        kv(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0], 2)?,
        kv(&[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0], 3)?,
    ];
    MdSpace::new(segments, vec![2, 1], 0.0, None)
}

/// The uniform degree-7 host space for [`compression_source_space`]: the same
/// three segments raised to degree 7, equivalent to a single B-spline space
/// with join multiplicities 5 and 6.
pub fn compression_target_space() -> Result<MdSpace> {
    let bernstein7 = kv(
        &[
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0,
        ],
        7,
    )?;
    MdSpace::new(
        vec![bernstein7.clone(), bernstein7.clone(), bernstein7],
        vec![2, 1],
        0.0,
        None,
    )
}

/// Coefficients of the demonstration spline in the compression source space.
pub fn compression_source_coeffs() -> Vec<f64> {
    vec![7.0, 4.0, 10.0, 1.0, 4.0, 2.5, 2.0, 1.5, 2.0, 3.0]
}
