use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::zoo::{StateSpec, TAIL_TOLERANCE};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: GridScale,
}

impl GridSpec {
    /// Grid values in ascending order with both endpoints hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|k| {
                if k == 0 {
                    return self.min;
                }
                if k == last {
                    return self.max;
                }
                let t = k as f64 / last as f64;
                match self.scale {
                    GridScale::Linear => self.min + (self.max - self.min) * t,
                    GridScale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub csv_path: Option<PathBuf>,
    #[serde(default)]
    pub svg_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Largest weight above `N_max` for a state to count as in-space.
    #[serde(default = "default_tail")]
    pub tail: f64,
}

fn default_tail() -> f64 {
    TAIL_TOLERANCE
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tail: default_tail(),
        }
    }
}

/// JSON description of a sweep over mean photon numbers.
///
/// State specs may leave `n_av` (and `n_max` for the coin kinds) open;
/// the grid value and the sweep's `n_max` are filled in per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub states: Vec<StateSpec>,
    pub m: u32,
    #[serde(alias = "N_max")]
    pub n_max: usize,
    pub n_av_grid: GridSpec,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: SweepConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.states.is_empty() {
            return bad("at least one state is required".into());
        }
        if self.m < 2 {
            return bad(format!("m must be at least 2, got {}", self.m));
        }
        if self.n_max < self.m as usize {
            return bad(format!("N_max = {} is below m = {}", self.n_max, self.m));
        }
        let g = &self.n_av_grid;
        if g.points < 2 {
            return bad(format!("grid needs at least 2 points, got {}", g.points));
        }
        if !g.min.is_finite() || !g.max.is_finite() {
            return bad("grid bounds must be finite".into());
        }
        if g.min >= g.max {
            return bad(format!("grid min {} must be below max {}", g.min, g.max));
        }
        if g.min < 0.0 {
            return bad(format!("grid min {} is negative", g.min));
        }
        if g.scale == GridScale::Log && g.min <= 0.0 {
            return bad("log grid requires min > 0".into());
        }
        if !(self.tolerances.tail > 0.0) {
            return bad("tail tolerance must be positive".into());
        }
        Ok(())
    }
}
