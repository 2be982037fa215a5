//! Named and ad-hoc per-feature rescaling settings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::encoding::RescaleWeights;
use crate::error::{Error, Result};

/// The four clinical rescaling configurations for the IPF feature block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RescalePreset {
    Resc1,
    Resc2,
    Resc3,
    Resc4,
}

const VITALS: [&str; 3] = ["Follow Up Time (days)", "Oxygen saturation %", "Heart rate"];

impl RescalePreset {
    pub const ALL: [RescalePreset; 4] = [
        RescalePreset::Resc1,
        RescalePreset::Resc2,
        RescalePreset::Resc3,
        RescalePreset::Resc4,
    ];

    /// Feature name and weight pairs; unnamed features keep weight 1.
    pub fn entries(self) -> Vec<(&'static str, f64)> {
        let vitals = |w: f64| VITALS.iter().map(|f| (*f, w)).collect();
        match self {
            RescalePreset::Resc1 => vitals(0.1),
            RescalePreset::Resc2 => vitals(10.0),
            RescalePreset::Resc3 => vitals(20.0),
            RescalePreset::Resc4 => vec![
                ("HRCT Pattern", 600.0),
                ("Smoking", 600.0),
                ("Smoking Status", 600.0),
                ("Sex", 10.0),
                ("Oxygen saturation %", 10.0),
            ],
        }
    }

    pub fn index(self) -> usize {
        match self {
            RescalePreset::Resc1 => 1,
            RescalePreset::Resc2 => 2,
            RescalePreset::Resc3 => 3,
            RescalePreset::Resc4 => 4,
        }
    }
}

impl fmt::Display for RescalePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Resc {}", self.index())
    }
}

impl FromStr for RescalePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match key.to_ascii_lowercase().as_str() {
            "resc1" | "1" => Ok(RescalePreset::Resc1),
            "resc2" | "2" => Ok(RescalePreset::Resc2),
            "resc3" | "3" => Ok(RescalePreset::Resc3),
            "resc4" | "4" => Ok(RescalePreset::Resc4),
            _ => Err(Error::InvalidSpec(format!("unknown rescaling preset '{s}'"))),
        }
    }
}

/// Weight vector for `preset` bound to `data` by feature name.
pub fn apply_preset(data: &Dataset, preset: RescalePreset) -> Result<RescaleWeights> {
    by_feature_name(data.feature_names(), preset.entries().into_iter())
}

fn by_feature_name<'a>(
    features: &[String],
    entries: impl Iterator<Item = (&'a str, f64)>,
) -> Result<RescaleWeights> {
    let mut w = vec![1.0; features.len()];
    for (name, weight) in entries {
        let i = features
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| Error::UnknownFeature(name.to_owned()))?;
        w[i] = weight;
    }
    RescaleWeights::new(w)
}

/// How patterns are rescaled before fitting and prediction.
///
/// In TOML: `rescale = { uniform = 2.0 }`, `rescale = { preset = "resc4" }`,
/// `rescale = { features = { "Heart rate" = 0.1 } }` or `rescale = { weights = [1.0, 2.0] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RescaleSetting {
    Uniform(f64),
    Preset(RescalePreset),
    Features(BTreeMap<String, f64>),
    Weights(Vec<f64>),
}

impl RescaleSetting {
    pub fn resolve(&self, data: &Dataset) -> Result<RescaleWeights> {
        self.resolve_for(data.feature_names())
    }

    /// Weights for a pattern layout with the given feature names.
    pub fn resolve_for(&self, features: &[String]) -> Result<RescaleWeights> {
        match self {
            RescaleSetting::Uniform(t) => RescaleWeights::uniform(features.len(), *t),
            RescaleSetting::Preset(p) => by_feature_name(features, p.entries().into_iter()),
            RescaleSetting::Features(map) => {
                by_feature_name(features, map.iter().map(|(k, v)| (k.as_str(), *v)))
            }
            RescaleSetting::Weights(w) => {
                if w.len() != features.len() {
                    return Err(Error::DimensionMismatch {
                        expected: features.len(),
                        got: w.len(),
                    });
                }
                RescaleWeights::new(w.clone())
            }
        }
    }
}
