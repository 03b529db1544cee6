//! Versioned JSON run configuration. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::BoundId;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub max_support: Option<usize>,
    #[serde(default)]
    pub max_labels: Option<usize>,
    /// Γ multiplier; values below 1 turn a suite into a negative control.
    #[serde(default)]
    pub gamma_scale: Option<f64>,
    /// Restricts `verify` to these bound ids.
    #[serde(default)]
    pub bounds: Option<Vec<BoundId>>,
    #[serde(default)]
    pub experiment: Option<ExperimentConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "d_points")]
    pub points: usize,
    #[serde(default = "d_features")]
    pub feature_dim: usize,
    #[serde(default = "d_iterations")]
    pub iterations: usize,
    /// Adds the constant stump to the boosting pool.
    #[serde(default = "d_true")]
    pub include_constant: bool,
    /// Initial backtracking step for logistic regression.
    #[serde(default = "d_step")]
    pub step_initial: f64,
}

fn d_points() -> usize {
    20
}
fn d_features() -> usize {
    2
}
fn d_iterations() -> usize {
    50
}
fn d_true() -> bool {
    true
}
fn d_step() -> f64 {
    4.0
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            points: d_points(),
            feature_dim: d_features(),
            iterations: d_iterations(),
            include_constant: true,
            step_initial: d_step(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if c.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                c.schema_version
            )));
        }
        if let Some(e) = &c.experiment {
            if e.points == 0 || e.feature_dim == 0 || !(e.step_initial > 0.0) {
                return Err(Error::Config("experiment needs points, feature_dim and step_initial positive".into()));
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}
