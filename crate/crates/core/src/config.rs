//! The single JSON document holding every pipeline tunable.
//!
//! Absent keys take their defaults and unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annotations::GoldAdapter;
use crate::detection::DetectionConfig;
use crate::enhance::EnhanceConfig;
use crate::spectrogram::SpectrogramParams;
use crate::Error;

/// Name of the adapter that reads canonical annotation CSVs.
pub const CANONICAL_ADAPTER: &str = "canonical";

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub channel: usize,
    pub spectrogram: SpectrogramParams,
    pub enhance: EnhanceConfig,
    pub detection: DetectionConfig,
    pub adapters: BTreeMap<String, GoldAdapter>,
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, Error> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.spectrogram.validate()?;
        self.enhance.validate()?;
        self.detection.validate().map_err(Error::Config)?;
        for (name, a) in &self.adapters {
            a.validate().map_err(|m| Error::Config(format!("adapter {name}: {m}")))?;
        }
        Ok(())
    }

    /// Looks up a configured adapter; `canonical` is always available.
    pub fn adapter(&self, name: &str) -> Option<GoldAdapter> {
        self.adapters
            .get(name)
            .cloned()
            .or_else(|| (name == CANONICAL_ADAPTER).then(GoldAdapter::canonical))
    }
}
