//! Trial evaluation: power savings, offsets, interference, satisfaction.
//!
//! Every averaged quantity is accumulated in linear watts and only converted
//! to decibels at the end; a zero-watt mean (e.g. the interference level of a
//! single-RRH network) keeps its linear value and reports no decibel figure
//! rather than −∞.
//!
//! The interference averages are transmit-power bookkeeping: for each victim
//! RRH they sum the *other* RRHs' radiated watts (or watts saved relative to
//! full power), normalize by the RRH count, and then average over victims.
//! Channel gains enter the simulation itself, not these aggregate figures.

use serde::{Deserialize, Serialize};

use crate::baselines::Algorithm;
use crate::error::{Result, SimError};
use crate::radio::{self, linear_to_db, PowerDbw, RadioConfig};
use crate::scenario::{NetworkState, Scenario};
use crate::sdql::EpisodeTrace;

/// A power-like quantity kept in linear watts, with a decibel view when the
/// value is strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbMetric {
    pub linear_watts: f64,
    pub db: Option<f64>,
}

impl DbMetric {
    pub fn from_linear_watts(watts: f64) -> Result<DbMetric> {
        if !watts.is_finite() {
            return Err(SimError::Domain(format!(
                "metric value must be finite, got {watts}"
            )));
        }
        Ok(DbMetric {
            linear_watts: watts,
            db: (watts > 0.0).then(|| linear_to_db(watts)),
        })
    }
}

/// Mean power saved per RRH relative to full power, over *all* RRHs.
/// A powered-off RRH saves the entire full-power draw.
pub fn avg_power_reduction(consumption: &[PowerDbw], p_max_dbw: f64) -> Result<DbMetric> {
    if consumption.is_empty() {
        return Err(SimError::EmptySamples);
    }
    let p_max_watts = PowerDbw::Dbw(p_max_dbw).watts();
    let total: f64 = consumption.iter().map(|p| p_max_watts - p.watts()).sum();
    DbMetric::from_linear_watts(total / consumption.len() as f64)
}

/// Mean of decibel offsets taken in the linear domain. +∞ entries (links with
/// no defined target power) are excluded; negative offsets enter as-is.
pub fn avg_power_offset(offsets_db: &[f64]) -> Result<DbMetric> {
    if offsets_db.iter().any(|o| o.is_nan() || *o == f64::NEG_INFINITY) {
        return Err(SimError::Domain(
            "power offsets must not be NaN or -inf".into(),
        ));
    }
    let kept: Vec<f64> = offsets_db.iter().copied().filter(|o| o.is_finite()).collect();
    if kept.is_empty() {
        return Err(SimError::EmptySamples);
    }
    let total: f64 = kept.iter().map(|o| radio::db_to_linear(*o)).sum();
    DbMetric::from_linear_watts(total / kept.len() as f64)
}

/// Interference level of a set of radiated powers: for each victim RRH, the
/// sum of all other RRHs' watts over the RRH count, averaged over victims.
/// Powered-off RRHs radiate nothing.
pub fn avg_interference(radiated: &[PowerDbw]) -> Result<DbMetric> {
    if radiated.is_empty() {
        return Err(SimError::EmptySamples);
    }
    let b = radiated.len() as f64;
    let mut victim_mean = 0.0;
    for victim in 0..radiated.len() {
        let heard: f64 = radiated
            .iter()
            .enumerate()
            .filter(|(other, _)| *other != victim)
            .map(|(_, p)| p.watts())
            .sum();
        victim_mean += heard / b;
    }
    DbMetric::from_linear_watts(victim_mean / b)
}

/// Drop in the interference level relative to every RRH radiating at full
/// power, aggregated exactly like [`avg_interference`].
pub fn avg_interference_reduction(radiated: &[PowerDbw], p_max_dbw: f64) -> Result<DbMetric> {
    if radiated.is_empty() {
        return Err(SimError::EmptySamples);
    }
    let p_max_watts = PowerDbw::Dbw(p_max_dbw).watts();
    let b = radiated.len() as f64;
    let mut victim_mean = 0.0;
    for victim in 0..radiated.len() {
        let saved: f64 = radiated
            .iter()
            .enumerate()
            .filter(|(other, _)| *other != victim)
            .map(|(_, p)| p_max_watts - p.watts())
            .sum();
        victim_mean += saved / b;
    }
    DbMetric::from_linear_watts(victim_mean / b)
}

/// Headroom each UE's link affords: full power over the power that would just
/// meet the UE's desired rate on a clean channel (thermal noise only). This is
/// the total margin the power reducer could ever discover for that link.
pub fn per_ue_offsets(scenario: &Scenario, radio_cfg: &RadioConfig) -> Result<Vec<f64>> {
    (0..scenario.ue_count())
        .map(|u| {
            let desired = radio::desired_power(
                radio_cfg,
                scenario.serving_gain(u),
                scenario.desired_rates_bps[u],
                0.0,
            )?;
            Ok(radio::power_offset(radio_cfg.p_max_dbw, desired))
        })
        .collect()
}

/// Whether a UE's throughput meets its desired rate.
pub fn is_satisfied(scenario: &Scenario, radio_cfg: &RadioConfig, state: &NetworkState, ue: usize) -> bool {
    state.throughput_at(scenario, radio_cfg, ue) >= scenario.desired_rates_bps[ue]
}

pub fn satisfied_count(scenario: &Scenario, radio_cfg: &RadioConfig, state: &NetworkState) -> usize {
    (0..scenario.ue_count())
        .filter(|&u| is_satisfied(scenario, radio_cfg, state, u))
        .count()
}

/// UEs crossing the satisfaction threshold between two states, as
/// (weak → central, central → weak) counts.
pub fn satisfaction_transitions(
    scenario: &Scenario,
    radio_cfg: &RadioConfig,
    before: &NetworkState,
    after: &NetworkState,
) -> (usize, usize) {
    let mut weak_to_central = 0;
    let mut central_to_weak = 0;
    for u in 0..scenario.ue_count() {
        let was = is_satisfied(scenario, radio_cfg, before, u);
        let is = is_satisfied(scenario, radio_cfg, after, u);
        match (was, is) {
            (false, true) => weak_to_central += 1,
            (true, false) => central_to_weak += 1,
            _ => {}
        }
    }
    (weak_to_central, central_to_weak)
}

/// Sorted (value, F(value)) pairs with F the fraction of samples ≤ value.
pub fn empirical_cdf(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(SimError::EmptySamples);
    }
    if samples.iter().any(|s| s.is_nan()) {
        return Err(SimError::Domain("CDF samples must not be NaN".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, (i + 1) as f64 / n))
        .collect())
}

/// Episode bookkeeping carried into a trial report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub iterations: usize,
    pub terminated_early: bool,
    pub floor_clamps: usize,
}

impl From<&EpisodeTrace> for EpisodeSummary {
    fn from(trace: &EpisodeTrace) -> EpisodeSummary {
        EpisodeSummary {
            iterations: trace.iterations,
            terminated_early: trace.terminated_early,
            floor_clamps: trace.floor_clamps,
        }
    }
}

/// Everything measured about one scheme on one scenario draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub power_weight: f64,
    pub throughput_weight: f64,
    pub rrh_count: usize,
    pub activated_count: usize,
    pub ue_count: usize,
    pub avg_power_reduction: DbMetric,
    pub avg_power_offset: DbMetric,
    pub avg_interference: DbMetric,
    pub avg_interference_reduction: DbMetric,
    /// Throughput the learner gave up across all of its actions, in bit/s.
    pub throughput_loss_total_bps: f64,
    pub satisfied_ues: usize,
    pub weak_to_central: usize,
    pub central_to_weak: usize,
    pub per_ue_offset_db: Vec<f64>,
    pub per_ue_rate_bps: Vec<f64>,
    pub episode: Option<EpisodeSummary>,
}

impl TrialReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<TrialReport> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Scores one scheme's outcome. `consumption` is the per-RRH consumed power
/// and `radiated` the resulting on-air state; the reference for reductions is
/// always the all-activated-at-full-power start state.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_trial(
    scenario: &Scenario,
    radio_cfg: &RadioConfig,
    algorithm: Algorithm,
    weights: (f64, f64),
    trial: usize,
    consumption: &[PowerDbw],
    radiated: &NetworkState,
    episode: Option<&EpisodeTrace>,
) -> Result<TrialReport> {
    if consumption.len() != scenario.rrh_count() {
        return Err(SimError::Domain(format!(
            "{} consumption entries for {} RRHs",
            consumption.len(),
            scenario.rrh_count()
        )));
    }
    let before = NetworkState::activation_start(scenario, radio_cfg);
    let offsets = per_ue_offsets(scenario, radio_cfg)?;
    let rates = radiated.throughputs(scenario, radio_cfg);
    let (weak_to_central, central_to_weak) =
        satisfaction_transitions(scenario, radio_cfg, &before, radiated);
    Ok(TrialReport {
        trial,
        seed: scenario.seed,
        algorithm,
        power_weight: weights.0,
        throughput_weight: weights.1,
        rrh_count: scenario.rrh_count(),
        activated_count: scenario.activated.len(),
        ue_count: scenario.ue_count(),
        avg_power_reduction: avg_power_reduction(consumption, radio_cfg.p_max_dbw)?,
        avg_power_offset: avg_power_offset(&offsets)?,
        avg_interference: avg_interference(&radiated.powers)?,
        avg_interference_reduction: avg_interference_reduction(
            &radiated.powers,
            radio_cfg.p_max_dbw,
        )?,
        throughput_loss_total_bps: episode
            .map(|t| t.steps.iter().map(|s| s.delta_r_bps).sum())
            .unwrap_or(0.0),
        satisfied_ues: satisfied_count(scenario, radio_cfg, radiated),
        weak_to_central,
        central_to_weak,
        per_ue_offset_db: offsets,
        per_ue_rate_bps: rates,
        episode: episode.map(EpisodeSummary::from),
    })
}
