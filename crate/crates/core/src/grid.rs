//! Named parameter points for sweeps, loadable from JSON.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::payoff::{ParamsError, UtilityParams};

pub const GRID_SCHEMA_VERSION: u32 = 1;

const DEFAULT_GRID: &str = include_str!("../data/param_grid_v1.json");

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid grid file")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported grid schema_version {0}, expected {GRID_SCHEMA_VERSION}")]
    Schema(u32),
    #[error("grid has no points")]
    Empty,
    #[error("grid point `{label}`")]
    Point { label: String, source: ParamsError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPoint {
    pub label: String,
    pub params: UtilityParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamGrid {
    pub schema_version: u32,
    pub name: String,
    pub version: u32,
    pub points: Vec<GridPoint>,
}

impl ParamGrid {
    /// The 12-point grid shipped with the crate. Its points cover flat,
    /// intermediate and steep rewards, plus increments below `c`.
    pub fn default_grid() -> Self {
        Self::from_json_str(DEFAULT_GRID).expect("bundled grid is valid")
    }

    pub fn from_json_str(s: &str) -> Result<Self, GridError> {
        let grid: ParamGrid = serde_json::from_str(s)?;
        if grid.schema_version != GRID_SCHEMA_VERSION {
            return Err(GridError::Schema(grid.schema_version));
        }
        if grid.points.is_empty() {
            return Err(GridError::Empty);
        }
        Ok(grid)
    }

    /// Checks that every point covers levels `0..n`.
    pub fn validate_for(&self, n: usize) -> Result<(), GridError> {
        for p in &self.points {
            p.params
                .validate_for(n)
                .map_err(|source| GridError::Point {
                    label: p.label.clone(),
                    source,
                })?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
