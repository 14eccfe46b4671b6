//! TOML-backed experiment configuration.
//!
//! Every section and field has a default, so an empty document is a valid,
//! fully specified experiment. Unknown keys are rejected everywhere — a typo
//! should fail loudly, not silently fall back to a default.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::radio::RadioConfig;
use crate::scenario::{RateProfile, ScenarioParams, MIN_UE_DISTANCE_M};
use crate::sdql::Hyperparams;

fn default_rrh_count() -> usize {
    57
}
fn default_inter_site_distance_m() -> f64 {
    200.0
}
fn default_activated_counts() -> Vec<usize> {
    vec![11, 17, 22, 28, 34]
}
fn default_rate_profile_mbps() -> Vec<f64> {
    RateProfile::default().values_mbps
}
fn default_trials() -> usize {
    100
}
fn default_base_seed() -> u64 {
    42
}
fn default_weights() -> Vec<[f64; 2]> {
    vec![[0.5, 0.5]]
}
fn default_output_dir() -> std::path::PathBuf {
    std::path::PathBuf::from("out")
}

/// Network layout and UE population drawn per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Sites in the hexagonal lattice.
    pub rrh_count: usize,
    /// Spacing between neighbouring sites, in metres.
    pub inter_site_distance_m: f64,
    /// Sweep over how many RRHs serve traffic.
    pub activated_counts: Vec<usize>,
    /// Support of the per-UE desired-rate draw, in Mb/s.
    pub rate_profile_mbps: Vec<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            rrh_count: default_rrh_count(),
            inter_site_distance_m: default_inter_site_distance_m(),
            activated_counts: default_activated_counts(),
            rate_profile_mbps: default_rate_profile_mbps(),
        }
    }
}

impl ScenarioConfig {
    pub fn rate_profile(&self) -> RateProfile {
        RateProfile {
            values_mbps: self.rate_profile_mbps.clone(),
        }
    }

    /// Generation parameters for one sweep cell.
    pub fn params_for(&self, activated_count: usize) -> ScenarioParams {
        ScenarioParams {
            rrh_count: self.rrh_count,
            inter_site_distance_m: self.inter_site_distance_m,
            activated_count,
            rate_profile: self.rate_profile(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rrh_count == 0 {
            return Err(SimError::invalid_config("scenario.rrh_count", "must be >= 1"));
        }
        if !self.inter_site_distance_m.is_finite()
            || !(self.inter_site_distance_m > 2.0 * MIN_UE_DISTANCE_M)
        {
            return Err(SimError::invalid_config(
                "scenario.inter_site_distance_m",
                format!(
                    "must exceed {} m so UEs fit between the minimum standoff and the half-spacing cell edge",
                    2.0 * MIN_UE_DISTANCE_M
                ),
            ));
        }
        if self.activated_counts.is_empty() {
            return Err(SimError::invalid_config(
                "scenario.activated_counts",
                "must list at least one count",
            ));
        }
        for pair in self.activated_counts.windows(2) {
            if pair[1] <= pair[0] {
                return Err(SimError::invalid_config(
                    "scenario.activated_counts",
                    "must be strictly increasing",
                ));
            }
        }
        for &count in &self.activated_counts {
            if count == 0 || count > self.rrh_count {
                return Err(SimError::invalid_config(
                    "scenario.activated_counts",
                    format!("count {count} outside 1..={}", self.rrh_count),
                ));
            }
        }
        self.rate_profile().validate()
    }
}

/// Baseline-scheme knobs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineConfig {
    /// Standby consumption of dormant RRHs in the sleep scheme, in dBW.
    /// Defaults to 10 dB below full power.
    pub sleep_power_dbw: Option<f64>,
}

/// Sweep dimensions and seeding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Independent scenario draws per sweep cell.
    pub trials: usize,
    /// Trial i of every cell uses seed `base_seed + i`, so cells share
    /// random numbers and sweep comparisons are paired.
    pub base_seed: u64,
    /// (power, throughput) reward-weight pairs to sweep.
    pub weights: Vec<[f64; 2]>,
    /// Where artifacts go unless overridden on the command line.
    pub output_dir: std::path::PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            trials: default_trials(),
            base_seed: default_base_seed(),
            weights: default_weights(),
            output_dir: default_output_dir(),
        }
    }
}

/// The whole experiment: radio constants, scenario generator, learner
/// hyperparameters, baseline knobs, and the sweep definition.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub radio: RadioConfig,
    pub scenario: ScenarioConfig,
    pub sdql: Hyperparams,
    pub baseline: BaselineConfig,
    pub run: RunConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<ExperimentConfig> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file, or yields the all-defaults experiment when no
    /// path is given.
    pub fn load(path: Option<&Path>) -> Result<ExperimentConfig> {
        match path {
            None => {
                let config = ExperimentConfig::default();
                config.validate()?;
                Ok(config)
            }
            Some(p) => ExperimentConfig::from_toml_str(&std::fs::read_to_string(p)?),
        }
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| SimError::InvalidArtifact(format!("config serialization: {e}")))
    }

    /// Sleep-scheme standby power with the relative default resolved.
    pub fn sleep_power_dbw(&self) -> f64 {
        self.baseline
            .sleep_power_dbw
            .unwrap_or(self.radio.p_max_dbw - 10.0)
    }

    /// Learner hyperparameters for one weight pair of the sweep.
    pub fn hyperparams_for(&self, weights: [f64; 2]) -> Hyperparams {
        Hyperparams {
            power_weight: weights[0],
            throughput_weight: weights[1],
            ..self.sdql.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.radio.validate()?;
        self.scenario.validate()?;
        self.sdql.validate()?;
        if let Some(sleep) = self.baseline.sleep_power_dbw {
            if !sleep.is_finite() || sleep >= self.radio.p_max_dbw {
                return Err(SimError::invalid_config(
                    "baseline.sleep_power_dbw",
                    format!("must be finite and below full power {}", self.radio.p_max_dbw),
                ));
            }
        }
        if self.run.trials == 0 {
            return Err(SimError::invalid_config("run.trials", "must be >= 1"));
        }
        if self.run.output_dir.as_os_str().is_empty() {
            return Err(SimError::invalid_config("run.output_dir", "must not be empty"));
        }
        if self.run.weights.is_empty() {
            return Err(SimError::invalid_config("run.weights", "must list at least one pair"));
        }
        for (i, w) in self.run.weights.iter().enumerate() {
            if !(w[0].is_finite() && w[1].is_finite() && w[0] >= 0.0 && w[1] >= 0.0) {
                return Err(SimError::invalid_config(
                    "run.weights",
                    format!("pair {i} must be two non-negative numbers"),
                ));
            }
            if (w[0] + w[1] - 1.0).abs() > 1e-9 {
                return Err(SimError::invalid_config(
                    "run.weights",
                    format!("pair {i} ({}, {}) must sum to 1", w[0], w[1]),
                ));
            }
        }
        // Every weight pair must itself form valid hyperparameters.
        for w in &self.run.weights {
            self.hyperparams_for(*w).validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_default_experiment() {
        let config = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(config, ExperimentConfig::default());
        assert_eq!(config.scenario.rrh_count, 57);
        assert_eq!(config.scenario.inter_site_distance_m, 200.0);
        assert_eq!(config.scenario.activated_counts, vec![11, 17, 22, 28, 34]);
        assert_eq!(config.run.trials, 100);
        assert_eq!(config.run.weights, vec![[0.5, 0.5]]);
        assert_eq!(config.radio.p_max_dbw, 15.2);
        // Relative sleep default resolves against full power.
        assert!((config.sleep_power_dbw() - 5.2).abs() < 1e-12);
    }

    #[test]
    fn partial_documents_override_only_named_fields() {
        let config = ExperimentConfig::from_toml_str(
            r#"
            [scenario]
            rrh_count = 19
            activated_counts = [3, 5]

            [run]
            trials = 7
            base_seed = 99
            weights = [[0.9, 0.1], [0.1, 0.9]]

            [baseline]
            sleep_power_dbw = -4.0

            [sdql]
            exploration = 0.0
            "#,
        )
        .unwrap();
        assert_eq!(config.scenario.rrh_count, 19);
        assert_eq!(config.scenario.activated_counts, vec![3, 5]);
        assert_eq!(config.scenario.inter_site_distance_m, 200.0);
        assert_eq!(config.run.trials, 7);
        assert_eq!(config.run.base_seed, 99);
        assert_eq!(config.sleep_power_dbw(), -4.0);
        assert_eq!(config.sdql.exploration, 0.0);
        assert_eq!(config.sdql.learning_rate, 0.1);
        let hyper = config.hyperparams_for([0.9, 0.1]);
        assert_eq!(hyper.power_weight, 0.9);
        assert_eq!(hyper.exploration, 0.0);
    }

    #[test]
    fn unknown_keys_are_rejected_in_every_section() {
        for text in [
            "speed = 3",
            "[radio]\nnoise_floor = -125",
            "[scenario]\ncount = 5",
            "[sdql]\nepsilon = 0.1",
            "[run]\nseed = 1",
            "[baseline]\nsleep = -4",
        ] {
            assert!(
                ExperimentConfig::from_toml_str(text).is_err(),
                "should reject {text:?}"
            );
        }
    }

    #[test]
    fn validation_names_the_offending_field() {
        let cases = [
            ("[run]\ntrials = 0", "run.trials"),
            ("[run]\noutput_dir = \"\"", "run.output_dir"),
            ("[run]\nweights = []", "run.weights"),
            ("[run]\nweights = [[0.7, 0.7]]", "run.weights"),
            ("[scenario]\nactivated_counts = []", "scenario.activated_counts"),
            ("[scenario]\nactivated_counts = [5, 5]", "scenario.activated_counts"),
            ("[scenario]\nactivated_counts = [90]", "scenario.activated_counts"),
            ("[scenario]\ninter_site_distance_m = 15.0", "scenario.inter_site_distance_m"),
            ("[scenario]\nrate_profile_mbps = []", "scenario.rate_profile"),
            ("[baseline]\nsleep_power_dbw = 15.2", "baseline.sleep_power_dbw"),
            ("[radio]\nbandwidth_hz = 0.0", "radio.bandwidth_hz"),
            ("[sdql]\nexploration = 1.0", "sdql.exploration"),
        ];
        for (text, field) in cases {
            let err = ExperimentConfig::from_toml_str(text).unwrap_err().to_string();
            assert!(err.contains(field), "error for {text:?} was {err:?}");
        }
    }

    #[test]
    fn config_round_trips_through_toml() {
        let mut config = ExperimentConfig::default();
        config.run.trials = 3;
        config.baseline.sleep_power_dbw = Some(-2.5);
        config.run.weights = vec![[0.3, 0.7]];
        let text = config.to_toml_string().unwrap();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn load_without_path_gives_defaults() {
        let config = ExperimentConfig::load(None).unwrap();
        assert_eq!(config, ExperimentConfig::default());
    }
}
