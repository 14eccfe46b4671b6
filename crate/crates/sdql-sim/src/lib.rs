//! Seedable Monte Carlo simulator of downlink C-RAN power management.
//!
//! A hexagonal RRH deployment serves one UE per activated RRH. Per trial, a
//! static deep Q-learning power reducer walks every activated RRH down from
//! maximum transmit power toward the minimum that still satisfies each UE's
//! desired rate, and the run is scored with linear-watt power/interference
//! metrics against activation and sleep-mode baselines.

pub mod baselines;
pub mod config;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod radio;
pub mod scenario;
pub mod sdql;

pub use error::{Result, SimError};
