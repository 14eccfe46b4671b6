//! Non-learning reference schemes.
//!
//! Both baselines radiate exactly like the episode start state — activated
//! RRHs at full power, dormant RRHs silent — so UE throughputs are identical
//! across them. They differ only in what the dormant RRHs *consume*: the
//! activation scheme powers them off entirely, while the sleep scheme keeps
//! them in a low-power standby that burns `sleep_power_dbw` without radiating.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::radio::{PowerDbw, RadioConfig};
use crate::scenario::{NetworkState, Scenario};

/// Power-management schemes the simulator can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sdql,
    Activation,
    Sleep,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Sdql, Algorithm::Activation, Algorithm::Sleep];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Sdql => "sdql",
            Algorithm::Activation => "activation",
            Algorithm::Sleep => "sleep",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Algorithm> {
        match s {
            "sdql" => Ok(Algorithm::Sdql),
            "activation" => Ok(Algorithm::Activation),
            "sleep" => Ok(Algorithm::Sleep),
            other => Err(SimError::Domain(format!(
                "unknown algorithm {other:?}, expected sdql, activation, or sleep"
            ))),
        }
    }
}

/// What a scheme consumed and what it radiated.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineOutcome {
    /// Per-RRH consumed power; drives the power-saving metric.
    pub consumption: Vec<PowerDbw>,
    /// Per-RRH radiated power; drives SINR, throughput, and interference.
    pub radiated: NetworkState,
}

/// Dormant RRHs are switched off outright: zero consumption, zero radiation.
pub fn activation_scheme(scenario: &Scenario, radio: &RadioConfig) -> BaselineOutcome {
    let radiated = NetworkState::activation_start(scenario, radio);
    BaselineOutcome {
        consumption: radiated.powers.clone(),
        radiated,
    }
}

/// Dormant RRHs idle in standby: they consume `sleep_power_dbw` but radiate
/// nothing. Activated RRHs stay at full power.
pub fn sleep_scheme(
    scenario: &Scenario,
    radio: &RadioConfig,
    sleep_power_dbw: f64,
) -> Result<BaselineOutcome> {
    if !sleep_power_dbw.is_finite() {
        return Err(SimError::invalid_config("baseline.sleep_power_dbw", "must be finite"));
    }
    if sleep_power_dbw >= radio.p_max_dbw {
        return Err(SimError::invalid_config(
            "baseline.sleep_power_dbw",
            format!(
                "standby power {sleep_power_dbw} dBW must be below full power {} dBW",
                radio.p_max_dbw
            ),
        ));
    }
    let radiated = NetworkState::activation_start(scenario, radio);
    let consumption = radiated
        .powers
        .iter()
        .map(|p| match p {
            PowerDbw::Off => PowerDbw::Dbw(sleep_power_dbw),
            on => *on,
        })
        .collect();
    Ok(BaselineOutcome { consumption, radiated })
}

/// Default standby consumption: 10 dB below full power.
pub fn default_sleep_power_dbw(radio: &RadioConfig) -> f64 {
    radio.p_max_dbw - 10.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radio::db_to_linear;
    use crate::scenario::{RateProfile, ScenarioParams};

    fn scenario_i(seed: u64) -> (RadioConfig, Scenario) {
        let radio = RadioConfig::default();
        let params = ScenarioParams {
            rrh_count: 57,
            inter_site_distance_m: 200.0,
            activated_count: 11,
            rate_profile: RateProfile::default(),
        };
        let scenario = Scenario::generate(&params, &radio, seed).unwrap();
        (radio, scenario)
    }

    #[test]
    fn activation_turns_dormant_rrhs_off() {
        let (radio, scenario) = scenario_i(5);
        let out = activation_scheme(&scenario, &radio);
        assert_eq!(out.consumption.len(), scenario.rrh_count());
        for b in 0..scenario.rrh_count() {
            if scenario.activated.contains(&b) {
                assert_eq!(out.consumption[b], PowerDbw::Dbw(radio.p_max_dbw));
            } else {
                assert_eq!(out.consumption[b], PowerDbw::Off);
            }
        }
        assert_eq!(out.consumption, out.radiated.powers);
    }

    #[test]
    fn sleep_burns_standby_power_without_radiating() {
        let (radio, scenario) = scenario_i(5);
        let sleep_dbw = default_sleep_power_dbw(&radio);
        let out = sleep_scheme(&scenario, &radio, sleep_dbw).unwrap();
        for b in 0..scenario.rrh_count() {
            if scenario.activated.contains(&b) {
                assert_eq!(out.consumption[b], PowerDbw::Dbw(radio.p_max_dbw));
                assert_eq!(out.radiated.powers[b], PowerDbw::Dbw(radio.p_max_dbw));
            } else {
                assert_eq!(out.consumption[b], PowerDbw::Dbw(sleep_dbw));
                assert_eq!(out.radiated.powers[b], PowerDbw::Off);
            }
        }
    }

    #[test]
    fn both_schemes_radiate_identically() {
        let (radio, scenario) = scenario_i(9);
        let a = activation_scheme(&scenario, &radio);
        let s = sleep_scheme(&scenario, &radio, default_sleep_power_dbw(&radio)).unwrap();
        assert_eq!(a.radiated, s.radiated);
        let ra = a.radiated.throughputs(&scenario, &radio);
        let rs = s.radiated.throughputs(&scenario, &radio);
        assert_eq!(ra, rs, "identical radiated powers must give identical rates");
    }

    #[test]
    fn activation_consumes_strictly_less_than_sleep() {
        let (radio, scenario) = scenario_i(13);
        let a = activation_scheme(&scenario, &radio);
        let s = sleep_scheme(&scenario, &radio, default_sleep_power_dbw(&radio)).unwrap();
        let total = |out: &BaselineOutcome| -> f64 { out.consumption.iter().map(|p| p.watts()).sum() };
        assert!(total(&a) < total(&s), "standby power must cost the sleep scheme");
        let dormant = scenario.rrh_count() - scenario.activated.len();
        let expected_gap = dormant as f64 * db_to_linear(default_sleep_power_dbw(&radio));
        assert!((total(&s) - total(&a) - expected_gap).abs() < 1e-9);
    }

    #[test]
    fn sleep_rejects_standby_at_or_above_full_power() {
        let (radio, scenario) = scenario_i(17);
        assert!(sleep_scheme(&scenario, &radio, radio.p_max_dbw).is_err());
        assert!(sleep_scheme(&scenario, &radio, f64::NAN).is_err());
        assert!(sleep_scheme(&scenario, &radio, radio.p_max_dbw - 0.1).is_ok());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for algo in Algorithm::ALL {
            assert_eq!(algo.as_str().parse::<Algorithm>().unwrap(), algo);
        }
        assert!("greedy".parse::<Algorithm>().is_err());
        assert_eq!(serde_json::to_string(&Algorithm::Sdql).unwrap(), "\"sdql\"");
    }
}
