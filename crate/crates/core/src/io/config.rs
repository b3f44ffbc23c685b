//! JSON configuration files for single filters and banks.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FormatError;
use crate::bank::{BankSpec, PruneRule, ThetaStep};
use crate::grid::GridShape;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKeyword {
    #[default]
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PruneKeyword {
    Auto,
    None,
}

/// `theta_step`: radians, or `"auto"` for the chord rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaStepSetting {
    Radians(f64),
    Keyword(AutoKeyword),
}

impl Default for ThetaStepSetting {
    fn default() -> Self {
        Self::Keyword(AutoKeyword::Auto)
    }
}

/// `prune_limit`: a bound on `|mu_i|`, `"auto"`, or `"none"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PruneSetting {
    Limit(f64),
    Keyword(PruneKeyword),
}

impl Default for PruneSetting {
    fn default() -> Self {
        Self::Keyword(PruneKeyword::Auto)
    }
}

fn default_theta_range() -> [f64; 2] {
    [0.0, std::f64::consts::FRAC_PI_2]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankConfigFile {
    #[serde(alias = "N")]
    pub n: usize,
    #[serde(alias = "D")]
    pub d: usize,
    pub sigma: f64,
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default)]
    pub theta_step: ThetaStepSetting,
    #[serde(default = "default_theta_range")]
    pub theta_range: [f64; 2],
    #[serde(default)]
    pub prune_limit: PruneSetting,
    #[serde(default)]
    pub full_circle: bool,
}

impl BankConfigFile {
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        serde_json::from_str(text).map_err(|e| FormatError::Config(e.to_string()))
    }

    /// The validated bank geometry. `full_circle` is not applied here; it
    /// selects the coverage layout.
    pub fn to_spec(&self) -> Result<BankSpec<f64>, FormatError> {
        let spec = BankSpec {
            shape: GridShape::new(self.d, self.n)?,
            sigma: self.sigma,
            radii: self.radii.clone(),
            theta_step: match self.theta_step {
                ThetaStepSetting::Radians(r) => ThetaStep::Fixed(r),
                ThetaStepSetting::Keyword(AutoKeyword::Auto) => ThetaStep::Auto,
            },
            theta_range: (self.theta_range[0], self.theta_range[1]),
            prune: match self.prune_limit {
                PruneSetting::Limit(l) => PruneRule::Limit(l),
                PruneSetting::Keyword(PruneKeyword::Auto) => PruneRule::Auto,
                PruneSetting::Keyword(PruneKeyword::None) => PruneRule::Disabled,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfigFile {
    #[serde(alias = "N")]
    pub n: usize,
    #[serde(alias = "D")]
    pub d: usize,
    pub mu: Vec<f64>,
    pub sigma: f64,
}

impl FilterConfigFile {
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        serde_json::from_str(text).map_err(|e| FormatError::Config(e.to_string()))
    }
}

pub fn load_bank_config(path: impl AsRef<Path>) -> Result<BankConfigFile, FormatError> {
    BankConfigFile::from_json(&std::fs::read_to_string(path)?)
}

pub fn load_filter_config(path: impl AsRef<Path>) -> Result<FilterConfigFile, FormatError> {
    FilterConfigFile::from_json(&std::fs::read_to_string(path)?)
}
