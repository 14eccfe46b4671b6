//! Downlink link-budget model.
//!
//! Free-space channel gains with a configurable path-loss exponent, RSRP,
//! SINR over linear watts, Shannon throughput, and the desired-power /
//! power-offset algebra used by the power reducer. All accumulation happens
//! in linear watts; decibels are a presentation and offset domain.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

// --- unit conversions -------------------------------------------------------

/// Converts a decibel quantity to its linear ratio (10^(db/10)).
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a positive linear ratio to decibels (10·log10(x)).
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

// --- transmit power ---------------------------------------------------------

/// A transmit power level: either a dBW value or the distinguished OFF state.
///
/// OFF means exactly zero radiated watts, which has no dBW representation;
/// keeping it a separate variant avoids −∞ leaking into arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerDbw {
    /// Radio fully off: exactly 0 W.
    Off,
    /// Transmit power in dBW.
    Dbw(f64),
}

impl PowerDbw {
    /// Linear transmit power in watts (OFF → 0.0).
    pub fn watts(self) -> f64 {
        match self {
            PowerDbw::Off => 0.0,
            PowerDbw::Dbw(dbw) => db_to_linear(dbw),
        }
    }

    /// Builds a power level from linear watts (0 W → OFF).
    pub fn from_watts(watts: f64) -> Result<Self> {
        if !watts.is_finite() || watts < 0.0 {
            return Err(SimError::Domain(format!(
                "transmit power must be finite and non-negative, got {watts} W"
            )));
        }
        if watts == 0.0 {
            Ok(PowerDbw::Off)
        } else {
            Ok(PowerDbw::Dbw(linear_to_db(watts)))
        }
    }

    /// The dBW value, or None when OFF.
    pub fn dbw(self) -> Option<f64> {
        match self {
            PowerDbw::Off => None,
            PowerDbw::Dbw(dbw) => Some(dbw),
        }
    }

    pub fn is_off(self) -> bool {
        matches!(self, PowerDbw::Off)
    }
}

impl Serialize for PowerDbw {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PowerDbw::Off => serializer.serialize_none(),
            PowerDbw::Dbw(dbw) => serializer.serialize_some(dbw),
        }
    }
}

impl<'de> Deserialize<'de> for PowerDbw {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = Option::<f64>::deserialize(deserializer)?;
        match value {
            None => Ok(PowerDbw::Off),
            Some(dbw) if dbw.is_finite() => Ok(PowerDbw::Dbw(dbw)),
            Some(dbw) => Err(serde::de::Error::custom(format!(
                "power in dBW must be finite, got {dbw}"
            ))),
        }
    }
}

// --- channel gain -----------------------------------------------------------

/// Linear (unitless) channel gain of one RRH→UE link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGain(pub f64);

impl LinkGain {
    pub fn linear(self) -> f64 {
        self.0
    }
}

// --- radio configuration ----------------------------------------------------

fn default_p_max_dbw() -> f64 {
    15.2
}
fn default_noise_dbw() -> f64 {
    -125.0
}
fn default_bandwidth_hz() -> f64 {
    10.0e6
}
fn default_tx_gain_dbi() -> f64 {
    17.5
}
fn default_center_freq_hz() -> f64 {
    1.8e9
}
fn default_speed_of_light_mps() -> f64 {
    3.0e8
}
fn default_pathloss_exponent() -> f64 {
    1.0
}

/// Physical-layer constants shared by every link in a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioConfig {
    /// Maximum RRH transmit power in dBW.
    pub p_max_dbw: f64,
    /// Receiver noise power in dBW.
    pub noise_dbw: f64,
    /// Channel bandwidth in Hz.
    pub bandwidth_hz: f64,
    /// Transmit antenna gain in dBi.
    pub tx_gain_dbi: f64,
    /// Carrier frequency in Hz.
    pub center_freq_hz: f64,
    /// Propagation speed in m/s.
    pub speed_of_light_mps: f64,
    /// Exponent applied to the free-space distance term.
    pub pathloss_exponent: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            p_max_dbw: default_p_max_dbw(),
            noise_dbw: default_noise_dbw(),
            bandwidth_hz: default_bandwidth_hz(),
            tx_gain_dbi: default_tx_gain_dbi(),
            center_freq_hz: default_center_freq_hz(),
            speed_of_light_mps: default_speed_of_light_mps(),
            pathloss_exponent: default_pathloss_exponent(),
        }
    }
}

impl RadioConfig {
    /// Maximum transmit power as a power level.
    pub fn p_max(&self) -> PowerDbw {
        PowerDbw::Dbw(self.p_max_dbw)
    }

    /// Noise power in linear watts.
    pub fn noise_watts(&self) -> f64 {
        db_to_linear(self.noise_dbw)
    }

    /// Numeric guard: powers are never reduced below this level (dBW).
    pub fn power_floor_dbw(&self) -> f64 {
        self.noise_dbw - 30.0
    }

    /// Checks every physical constant for validity, reporting the field path.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("radio.bandwidth_hz", self.bandwidth_hz),
            ("radio.center_freq_hz", self.center_freq_hz),
            ("radio.speed_of_light_mps", self.speed_of_light_mps),
        ];
        for (field, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(SimError::invalid_config(field, format!("must be positive, got {value}")));
            }
        }
        if !self.pathloss_exponent.is_finite() || self.pathloss_exponent < 1.0 {
            return Err(SimError::invalid_config(
                "radio.pathloss_exponent",
                format!("must be at least 1, got {}", self.pathloss_exponent),
            ));
        }
        for (field, value) in [
            ("radio.p_max_dbw", self.p_max_dbw),
            ("radio.noise_dbw", self.noise_dbw),
            ("radio.tx_gain_dbi", self.tx_gain_dbi),
        ] {
            if !value.is_finite() {
                return Err(SimError::invalid_config(field, "must be finite"));
            }
        }
        if self.p_max_dbw <= self.noise_dbw {
            return Err(SimError::invalid_config(
                "radio.p_max_dbw",
                format!("must exceed noise_dbw ({} dBW)", self.noise_dbw),
            ));
        }
        Ok(())
    }
}

// --- link algebra -----------------------------------------------------------

/// Free-space channel gain of a link of length `distance_m`:
/// antenna gain × (c / (4π·f·D))^exponent.
pub fn channel_gain(cfg: &RadioConfig, distance_m: f64) -> Result<LinkGain> {
    if !distance_m.is_finite() || distance_m <= 0.0 {
        return Err(SimError::Domain(format!(
            "link distance must be positive, got {distance_m} m"
        )));
    }
    let tx_gain_linear = db_to_linear(cfg.tx_gain_dbi);
    let distance_term =
        cfg.speed_of_light_mps / (4.0 * std::f64::consts::PI * cfg.center_freq_hz * distance_m);
    Ok(LinkGain(tx_gain_linear * distance_term.powf(cfg.pathloss_exponent)))
}

/// Received power of one link in linear watts.
pub fn rsrp_watts(power: PowerDbw, gain: LinkGain) -> f64 {
    power.watts() * gain.linear()
}

/// Received power of one link as a power level (OFF propagates).
pub fn rsrp_dbw(power: PowerDbw, gain: LinkGain) -> PowerDbw {
    match power {
        PowerDbw::Off => PowerDbw::Off,
        _ => PowerDbw::Dbw(linear_to_db(rsrp_watts(power, gain))),
    }
}

/// SINR of a served link: serving RSRP over (interference + noise), all in
/// linear watts. Interferer gains are toward the victim UE.
pub fn sinr(
    serving_power: PowerDbw,
    serving_gain: LinkGain,
    interferers: &[(PowerDbw, LinkGain)],
    noise_watts: f64,
) -> Result<f64> {
    if !noise_watts.is_finite() || noise_watts <= 0.0 {
        return Err(SimError::Domain(format!(
            "noise power must be positive, got {noise_watts} W"
        )));
    }
    let interference: f64 = interferers
        .iter()
        .map(|&(power, gain)| rsrp_watts(power, gain))
        .sum();
    Ok(rsrp_watts(serving_power, serving_gain) / (interference + noise_watts))
}

/// Total interference power at a victim in linear watts.
pub fn interference_watts(interferers: &[(PowerDbw, LinkGain)]) -> f64 {
    interferers
        .iter()
        .map(|&(power, gain)| rsrp_watts(power, gain))
        .sum()
}

/// Shannon throughput in bit/s: bandwidth × log2(1 + SINR).
pub fn throughput(cfg: &RadioConfig, sinr: f64) -> Result<f64> {
    if !sinr.is_finite() || sinr < 0.0 {
        return Err(SimError::Domain(format!("SINR must be non-negative, got {sinr}")));
    }
    Ok(cfg.bandwidth_hz * (1.0 + sinr).log2())
}

/// SINR needed to hit a desired rate: 2^(rate/bandwidth) − 1.
pub fn desired_sinr(cfg: &RadioConfig, rate_bps: f64) -> Result<f64> {
    if !rate_bps.is_finite() || rate_bps < 0.0 {
        return Err(SimError::Domain(format!(
            "desired rate must be non-negative, got {rate_bps} bit/s"
        )));
    }
    Ok((rate_bps / cfg.bandwidth_hz).exp2() - 1.0)
}

/// Transmit power that meets `rate_bps` exactly at the given interference:
/// desired SINR × (interference + noise) / serving gain. A zero desired rate
/// wants the radio OFF.
pub fn desired_power(
    cfg: &RadioConfig,
    serving_gain: LinkGain,
    rate_bps: f64,
    interference_watts: f64,
) -> Result<PowerDbw> {
    if !interference_watts.is_finite() || interference_watts < 0.0 {
        return Err(SimError::Domain(format!(
            "interference must be non-negative, got {interference_watts} W"
        )));
    }
    if serving_gain.linear() <= 0.0 {
        return Err(SimError::Domain(format!(
            "serving gain must be positive, got {}",
            serving_gain.linear()
        )));
    }
    let gamma = desired_sinr(cfg, rate_bps)?;
    if gamma == 0.0 {
        return Ok(PowerDbw::Off);
    }
    let watts = gamma * (interference_watts + cfg.noise_watts()) / serving_gain.linear();
    PowerDbw::from_watts(watts)
}

/// Power offset in dB between a currently transmitting RRH and its desired
/// power. A desired power of OFF yields +∞ (any reduction overshoots).
pub fn power_offset(current_dbw: f64, desired: PowerDbw) -> f64 {
    match desired {
        PowerDbw::Off => f64::INFINITY,
        PowerDbw::Dbw(desired_dbw) => current_dbw - desired_dbw,
    }
}

// --- tests -------------------------------------------------------------------
