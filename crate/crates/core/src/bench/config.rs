//! Simulation scenario and per-method settings, as read from JSON.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::belief::{AppriouVariant, DEFAULT_DENOEUX_ALPHA};
use crate::error::{FusionError, Result};
use crate::frame::Frame;
use crate::possibility::CombinationOperator;

/// Sediment classes and their observed shares (percent). The shares sum to
/// 93.34, so they are renormalized before use.
pub const SEDIMENT_CLASSES: [(&str, f64); 6] = [
    ("sable", 54.52),
    ("roche", 21.35),
    ("ride", 8.80),
    ("vase", 5.50),
    ("cailloutis", 0.77),
    ("ombre", 2.40),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceProfile {
    pub id: String,
    /// Probability of deciding the true class, per true class.
    pub reliability: Vec<f64>,
    /// Weight of uniform noise blended into the one-hot score vector.
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VoteSettings {
    pub c: f64,
    pub b: f64,
}

impl Default for VoteSettings {
    fn default() -> Self {
        Self { c: 0.0, b: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PossibilitySettings {
    pub operator: CombinationOperator,
}

impl Default for PossibilitySettings {
    fn default() -> Self {
        Self {
            operator: CombinationOperator::Max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DenoeuxSettings {
    pub k: usize,
    pub alpha: f64,
}

impl Default for DenoeuxSettings {
    fn default() -> Self {
        Self {
            k: 10,
            alpha: DEFAULT_DENOEUX_ALPHA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppriouSettings {
    pub as_printed: bool,
}

impl AppriouSettings {
    pub fn variant(self) -> AppriouVariant {
        if self.as_printed {
            AppriouVariant::AsPrinted
        } else {
            AppriouVariant::Corrected
        }
    }
}

/// Method-specific knobs shared by `run` and `eval`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionSettings {
    pub vote: VoteSettings,
    pub possibility: PossibilitySettings,
    pub denoeux: DenoeuxSettings,
    pub appriou: AppriouSettings,
}

impl FusionSettings {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.vote.c) {
            return Err(FusionError::ThresholdOutOfRange(self.vote.c));
        }
        if !self.vote.b.is_finite() {
            return Err(FusionError::InvalidConfig("vote.b must be finite".into()));
        }
        if self.denoeux.k == 0 {
            return Err(FusionError::InvalidConfig(
                "denoeux.k must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.denoeux.alpha) {
            return Err(FusionError::InvalidConfig(format!(
                "denoeux.alpha = {} outside [0, 1]",
                self.denoeux.alpha
            )));
        }
        Ok(())
    }
}

/// A synthetic multi-source scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub classes: Vec<String>,
    pub priors: Vec<f64>,
    pub sources: Vec<SourceProfile>,
    pub n_samples: usize,
    #[serde(default = "one")]
    pub n_trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(flatten)]
    pub fusion: FusionSettings,
}

fn one() -> usize {
    1
}

impl SimConfig {
    /// Six sediment classes, four sources mirroring the single-classifier
    /// rates of the texture study (one weak run-length source), ten trials.
    pub fn sediment_default() -> Self {
        let total: f64 = SEDIMENT_CLASSES.iter().map(|(_, p)| p).sum();
        let n = SEDIMENT_CLASSES.len();
        let source = |id: &str, r: f64, t: f64| SourceProfile {
            id: id.to_string(),
            reliability: vec![r; n],
            temperature: t,
        };
        Self {
            classes: SEDIMENT_CLASSES
                .iter()
                .map(|(c, _)| c.to_string())
                .collect(),
            priors: SEDIMENT_CLASSES.iter().map(|(_, p)| p / total).collect(),
            sources: vec![
                source("cooccurrence", 0.70, 0.3),
                source("run_length", 0.50, 0.3),
                source("wavelet", 0.69, 0.3),
                source("gabor", 0.66, 0.3),
            ],
            n_samples: 3000,
            n_trials: 10,
            seed: 2005,
            fusion: FusionSettings::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn frame(&self) -> Result<Frame> {
        Frame::new(self.classes.iter().cloned())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.frame()?.len();
        let bad = |msg: String| Err(FusionError::InvalidConfig(msg));
        if self.priors.len() != n {
            return bad(format!("{} priors for {n} classes", self.priors.len()));
        }
        if self.priors.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return bad("priors must be non-negative".into());
        }
        let total: f64 = self.priors.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return bad(format!("priors sum to {total}, expected 1"));
        }
        if self.sources.is_empty() {
            return bad("at least one source is required".into());
        }
        let mut ids = HashSet::new();
        for s in &self.sources {
            if s.id.is_empty() || !ids.insert(s.id.as_str()) {
                return bad(format!("source id `{}` is empty or repeated", s.id));
            }
            if s.reliability.len() != n {
                return bad(format!(
                    "source `{}` has {} reliabilities for {n} classes",
                    s.id,
                    s.reliability.len()
                ));
            }
            if s.reliability.iter().any(|r| !(0.0..=1.0).contains(r)) {
                return bad(format!("source `{}` reliability outside [0, 1]", s.id));
            }
            if !(0.0..=1.0).contains(&s.temperature) {
                return bad(format!("source `{}` temperature outside [0, 1]", s.id));
            }
        }
        if self.n_samples == 0 {
            return bad("n_samples must be positive".into());
        }
        if self.n_trials == 0 {
            return bad("n_trials must be at least 1".into());
        }
        self.fusion.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sediment_priors_are_renormalized() {
        let c = SimConfig::sediment_default();
        c.validate().unwrap();
        assert!((c.priors.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((c.priors[0] - 54.52 / 93.34).abs() < 1e-12);
        assert!((c.priors[4] - 0.77 / 93.34).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let c = SimConfig::sediment_default();
        assert_eq!(SimConfig::from_json(&c.to_json().unwrap()).unwrap(), c);

        let minimal = r#"{
            "classes": ["a", "b"], "priors": [0.5, 0.5],
            "sources": [{"id": "s", "reliability": [0.7, 0.7], "temperature": 0.2}],
            "n_samples": 30, "possibility": {"operator": "min"}
        }"#;
        let c = SimConfig::from_json(minimal).unwrap();
        assert_eq!(c.n_trials, 1);
        assert_eq!(c.fusion.possibility.operator, CombinationOperator::Min);
        assert_eq!(c.fusion.denoeux, DenoeuxSettings::default());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = SimConfig::sediment_default();
        c.priors[0] += 0.1;
        assert!(c.validate().is_err());

        let mut c = SimConfig::sediment_default();
        c.sources[1].reliability[2] = 1.5;
        assert!(c.validate().is_err());

        let mut c = SimConfig::sediment_default();
        c.sources[1].id = "cooccurrence".into();
        assert!(c.validate().is_err());

        let mut c = SimConfig::sediment_default();
        c.n_trials = 0;
        assert!(c.validate().is_err());

        let mut c = SimConfig::sediment_default();
        c.fusion.vote.c = 2.0;
        assert!(c.validate().is_err());

        let mut c = SimConfig::sediment_default();
        c.classes.push("sable".into());
        c.priors.push(0.0);
        assert!(c.validate().is_err());

        assert!(SimConfig::from_json(r#"{"classes": ["a"]}"#).is_err());
    }
}
