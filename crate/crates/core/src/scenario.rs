//! TOML scenario files driving the command-line tool.
//!
//! ```toml
//! n = 3
//! sigma_idle = 0.01
//! sigma_success = 1.01
//! sigma_collision = 2.02
//! initial_ages = [{ value = 2, unit = "sigma_s" }, { value = 3, unit = "sigma_s" }, 3.03]
//! seed = 42
//! num_slots = 1000000
//!
//! [sweep]
//! node = 3
//! from = { value = 3, unit = "sigma_s" }
//! to = { value = 4, unit = "sigma_s" }
//! steps = 11
//! ```
//!
//! Durations are either bare numbers in absolute time units, or
//! `{ value, unit }` pairs where `unit` is `"absolute"` or `"sigma_s"`
//! (multiples of the successful slot length). Setting `age_unit = "sigma_s"`
//! at the top level makes bare numbers in `initial_ages` and `sweep` count in
//! multiples of the successful slot length too. Node numbers in files and CSV
//! headers start at 1.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::GameError;
use crate::game::{GameInstance, SlotLengths, StrategyProfile};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed scenario file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot serialize scenario: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("invalid scenario: {0}")]
    Invalid(#[from] GameError),
    #[error("invalid scenario: {0}")]
    Field(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DurationUnit {
    #[default]
    Absolute,
    SigmaS,
}

/// A duration as written in a scenario file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DurationSpec {
    Bare(f64),
    WithUnit { value: f64, unit: DurationUnit },
}

impl DurationSpec {
    pub fn sigma_s(value: f64) -> Self {
        DurationSpec::WithUnit {
            value,
            unit: DurationUnit::SigmaS,
        }
    }

    /// Absolute duration; `default_unit` applies to bare numbers.
    pub fn resolve(&self, sigma_success: f64, default_unit: DurationUnit) -> f64 {
        let (value, unit) = match *self {
            DurationSpec::Bare(v) => (v, default_unit),
            DurationSpec::WithUnit { value, unit } => (value, unit),
        };
        match unit {
            DurationUnit::Absolute => value,
            DurationUnit::SigmaS => value * sigma_success,
        }
    }
}

/// Sweep of one node's starting age over `steps` evenly spaced points, endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// 1-based node number.
    pub node: usize,
    pub from: DurationSpec,
    pub to: DurationSpec,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub n: usize,
    pub sigma_idle: f64,
    pub sigma_success: f64,
    pub sigma_collision: f64,
    #[serde(default, skip_serializing_if = "is_absolute")]
    pub age_unit: DurationUnit,
    pub initial_ages: Vec<DurationSpec>,
    pub seed: u64,
    pub num_slots: u64,
    /// Explicit transmit probabilities for `simulate`; the closed-form
    /// equilibrium is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taus: Option<Vec<f64>>,
    /// Slots in the sequential trajectory written by `simulate --out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_slots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn is_absolute(unit: &DurationUnit) -> bool {
    *unit == DurationUnit::Absolute
}

pub const DEFAULT_TRAJECTORY_SLOTS: u64 = 100;

impl ScenarioFile {
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String, ScenarioError> {
        Ok(toml::to_string(self)?)
    }

    pub fn slot_lengths(&self) -> Result<SlotLengths<f64>, ScenarioError> {
        Ok(SlotLengths::new(
            self.sigma_idle,
            self.sigma_success,
            self.sigma_collision,
        )?)
    }

    pub fn resolve(&self, duration: &DurationSpec) -> f64 {
        duration.resolve(self.sigma_success, self.age_unit)
    }

    pub fn ages(&self) -> Vec<f64> {
        self.initial_ages.iter().map(|a| self.resolve(a)).collect()
    }

    /// Validates the file into a game, re-checking every slot-length and age invariant.
    pub fn to_game(&self) -> Result<GameInstance<f64>, ScenarioError> {
        if self.initial_ages.len() != self.n {
            return Err(ScenarioError::Field(format!(
                "n = {} but initial_ages has {} entries",
                self.n,
                self.initial_ages.len()
            )));
        }
        Ok(GameInstance::new(self.slot_lengths()?, self.ages())?)
    }

    /// The explicit `taus` list as a profile, if present.
    pub fn explicit_profile(&self) -> Result<Option<StrategyProfile<f64>>, ScenarioError> {
        match &self.taus {
            None => Ok(None),
            Some(taus) => {
                if taus.len() != self.n {
                    return Err(ScenarioError::Field(format!(
                        "n = {} but taus has {} entries",
                        self.n,
                        taus.len()
                    )));
                }
                Ok(Some(StrategyProfile::new(taus.clone())?))
            }
        }
    }

    /// 0-based node index and absolute ages of the sweep points.
    pub fn sweep_ages(&self) -> Result<(usize, Vec<f64>), ScenarioError> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| ScenarioError::Field("scenario has no [sweep] block".into()))?;
        if sweep.node == 0 || sweep.node > self.n {
            return Err(ScenarioError::Field(format!(
                "sweep.node must be between 1 and {}, got {}",
                self.n, sweep.node
            )));
        }
        if sweep.steps < 2 {
            return Err(ScenarioError::Field(format!(
                "sweep.steps must be at least 2, got {}",
                sweep.steps
            )));
        }
        let from = self.resolve(&sweep.from);
        let to = self.resolve(&sweep.to);
        for (name, age) in [("from", from), ("to", to)] {
            if !(age >= self.sigma_success) {
                return Err(ScenarioError::Field(format!(
                    "sweep.{name} = {age} is below the successful slot length {}",
                    self.sigma_success
                )));
            }
        }
        let last = (sweep.steps - 1) as f64;
        let ages = (0..sweep.steps)
            .map(|k| {
                if k == sweep.steps - 1 {
                    to
                } else {
                    from + (to - from) * k as f64 / last
                }
            })
            .collect();
        Ok((sweep.node - 1, ages))
    }

    pub fn trajectory_slots(&self) -> u64 {
        self.trajectory_slots.unwrap_or(DEFAULT_TRAJECTORY_SLOTS)
    }
}
