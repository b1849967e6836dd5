//! JSON space configuration files.
//!
//! ```json
//! {
//!   "segments": [
//!     { "degree": 3, "knots": [0, 0, 0, 0, 2, 2, 2, 2] },
//!     { "degree": 2, "knots": [0, 0, 0, 1, 1, 1] }
//!   ],
//!   "continuity": [1],
//!   "origin": 0.0,
//!   "periodic_order": 1
//! }
//! ```
//!
//! `origin` and `periodic_order` are optional; unknown fields are rejected so
//! that a misspelled key cannot silently change the space.

use std::path::Path;

use serde::Deserialize;

use mdbspline::{MdSpace, OpenKnotVector};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfigFile {
    pub segments: Vec<SegmentSpec>,
    pub continuity: Vec<i32>,
    #[serde(default)]
    pub periodic_order: Option<i32>,
    #[serde(default)]
    pub origin: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub degree: usize,
    pub knots: Vec<f64>,
}

impl SpaceConfigFile {
    pub fn into_space(self) -> Result<MdSpace, CliError> {
        let segments = self
            .segments
            .into_iter()
            .enumerate()
            .map(|(i, spec)| {
                OpenKnotVector::new(spec.knots, spec.degree)
                    .map_err(|e| CliError::Config(format!("segment {i}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        MdSpace::new(
            segments,
            self.continuity,
            self.origin.unwrap_or(0.0),
            self.periodic_order,
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }
}

pub fn load_space(path: &Path) -> Result<MdSpace, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let parsed: SpaceConfigFile = serde_json::from_str(&text).map_err(|e| {
        CliError::Config(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    parsed.into_space()
}
