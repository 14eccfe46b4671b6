//! Simulation instances: hexagonal RRH topology, UE placement, desired
//! rates, max-RSRP association, and the per-instance network state.
//!
//! A scenario owns everything a trial needs to be replayed byte-for-byte:
//! site positions, the activated subset, UE positions and desired rates, the
//! serving assignment, the full link-gain matrix, and the seed it was drawn
//! from. Interference always sums over *activated* RRHs only; dormant RRHs
//! never radiate regardless of the power value a scheme books for them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::radio::{self, channel_gain, LinkGain, PowerDbw, RadioConfig};

/// UEs are never placed closer than this to their serving RRH.
pub const MIN_UE_DISTANCE_M: f64 = 10.0;

/// Placement redraws allowed before association gives up.
const MAX_ASSOCIATION_RETRIES: u32 = 100;

// --- geometry ----------------------------------------------------------------

/// A point in the deployment plane (metres).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// RRH site layout: a hexagonal lattice filled ring by ring from the centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub rrh_positions: Vec<Point>,
    pub inter_site_distance_m: f64,
}

/// Axial hex coordinates → plane, with lattice spacing `d`.
fn axial_to_point(q: i32, r: i32, d: f64) -> Point {
    Point {
        x: d * (q as f64 + r as f64 / 2.0),
        y: d * (3f64.sqrt() / 2.0) * r as f64,
    }
}

/// Builds a lattice of `rrh_count` sites: the centre site, then complete
/// rings walked in a fixed order, truncating the outermost ring as needed.
pub fn build_topology(rrh_count: usize, inter_site_distance_m: f64) -> Result<Topology> {
    if rrh_count == 0 {
        return Err(SimError::Domain("topology needs at least one RRH".into()));
    }
    if !inter_site_distance_m.is_finite() || inter_site_distance_m <= 0.0 {
        return Err(SimError::Domain(format!(
            "inter-site distance must be positive, got {inter_site_distance_m} m"
        )));
    }
    const DIRECTIONS: [(i32, i32); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];
    let mut positions = vec![axial_to_point(0, 0, inter_site_distance_m)];
    let mut ring = 1i32;
    while positions.len() < rrh_count {
        // Start each ring at (-ring, ring) and walk the six edges.
        let (mut q, mut r) = (-ring, ring);
        'ring: for &(dq, dr) in &DIRECTIONS {
            for _ in 0..ring {
                positions.push(axial_to_point(q, r, inter_site_distance_m));
                if positions.len() == rrh_count {
                    break 'ring;
                }
                q += dq;
                r += dr;
            }
        }
        ring += 1;
    }
    Ok(Topology {
        rrh_positions: positions,
        inter_site_distance_m,
    })
}

impl Topology {
    pub fn rrh_count(&self) -> usize {
        self.rrh_positions.len()
    }
}

// --- desired rates -----------------------------------------------------------

fn default_rate_support() -> Vec<f64> {
    (1..=10).map(|k| 2.0 * k as f64).collect()
}

/// Desired-rate distribution: i.i.d. uniform over a finite support in Mb/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateProfile {
    /// Support values in Mb/s; a single value makes the profile degenerate.
    pub values_mbps: Vec<f64>,
}

impl Default for RateProfile {
    fn default() -> Self {
        RateProfile {
            values_mbps: default_rate_support(),
        }
    }
}

impl RateProfile {
    pub fn validate(&self) -> Result<()> {
        if self.values_mbps.is_empty() {
            return Err(SimError::invalid_config(
                "scenario.rate_profile_mbps",
                "support must be non-empty",
            ));
        }
        for &v in &self.values_mbps {
            if !v.is_finite() || v <= 0.0 {
                return Err(SimError::invalid_config(
                    "scenario.rate_profile_mbps",
                    format!("support values must be positive, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// Draws one desired rate per UE, in bit/s.
pub fn assign_desired_rates(count: usize, profile: &RateProfile, rng: &mut impl Rng) -> Vec<f64> {
    (0..count)
        .map(|_| profile.values_mbps[rng.random_range(0..profile.values_mbps.len())] * 1.0e6)
        .collect()
}

// --- placement and association -------------------------------------------------

/// Places one UE per activated RRH, uniformly on the annulus between
/// `MIN_UE_DISTANCE_M` and half the inter-site distance around that RRH.
pub fn place_ues(topology: &Topology, activated: &[usize], rng: &mut impl Rng) -> Result<Vec<Point>> {
    let outer = topology.inter_site_distance_m / 2.0;
    if outer <= MIN_UE_DISTANCE_M {
        return Err(SimError::Domain(format!(
            "inter-site distance {} m leaves no room for UE placement (needs > {} m)",
            topology.inter_site_distance_m,
            2.0 * MIN_UE_DISTANCE_M
        )));
    }
    let inner_sq = MIN_UE_DISTANCE_M * MIN_UE_DISTANCE_M;
    let outer_sq = outer * outer;
    Ok(activated
        .iter()
        .map(|&b| {
            let centre = topology.rrh_positions[b];
            let radius = (rng.random::<f64>() * (outer_sq - inner_sq) + inner_sq).sqrt();
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            Point {
                x: centre.x + radius * theta.cos(),
                y: centre.y + radius * theta.sin(),
            }
        })
        .collect())
}

/// Dense link-gain matrix over all RRHs × all UEs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainMatrix {
    rrh_count: usize,
    ue_count: usize,
    gains: Vec<f64>,
}

impl GainMatrix {
    pub fn compute(radio: &RadioConfig, topology: &Topology, ues: &[Point]) -> Result<Self> {
        let mut gains = Vec::with_capacity(topology.rrh_count() * ues.len());
        for rrh in &topology.rrh_positions {
            for ue in ues {
                gains.push(channel_gain(radio, rrh.distance(*ue))?.linear());
            }
        }
        Ok(GainMatrix {
            rrh_count: topology.rrh_count(),
            ue_count: ues.len(),
            gains,
        })
    }

    /// Gain of the link RRH `b` → UE `u`.
    pub fn gain(&self, b: usize, u: usize) -> LinkGain {
        LinkGain(self.gains[b * self.ue_count + u])
    }

    pub fn rrh_count(&self) -> usize {
        self.rrh_count
    }

    pub fn ue_count(&self) -> usize {
        self.ue_count
    }
}

/// Max-RSRP association at uniform transmit power: each UE picks the
/// activated RRH with the strongest gain, ties to the lowest RRH index.
pub fn associate(gains: &GainMatrix, activated: &[usize]) -> Vec<usize> {
    (0..gains.ue_count())
        .map(|u| {
            let mut best = activated[0];
            let mut best_gain = gains.gain(best, u).linear();
            for &b in &activated[1..] {
                let g = gains.gain(b, u).linear();
                if g > best_gain {
                    best = b;
                    best_gain = g;
                }
            }
            best
        })
        .collect()
}

// --- scenario ------------------------------------------------------------------

/// Generation parameters for one scenario cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub rrh_count: usize,
    pub inter_site_distance_m: f64,
    pub activated_count: usize,
    pub rate_profile: RateProfile,
}

/// One fully drawn simulation instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub topology: Topology,
    /// Activated RRH indices, sorted ascending.
    pub activated: Vec<usize>,
    /// One UE per activated RRH, in `activated` order.
    pub ue_positions: Vec<Point>,
    /// Desired rate per UE in bit/s.
    pub desired_rates_bps: Vec<f64>,
    /// Serving RRH per UE (a bijection onto `activated`).
    pub serving_rrh: Vec<usize>,
    /// Link gains for every RRH → UE pair.
    pub gains: GainMatrix,
    /// Seed this instance was drawn from.
    pub seed: u64,
}

impl Scenario {
    /// Draws an instance: activation subset, UE placement (redrawn until the
    /// association is a bijection), desired rates, gains, association.
    pub fn generate(params: &ScenarioParams, radio: &RadioConfig, seed: u64) -> Result<Scenario> {
        params.rate_profile.validate()?;
        if params.activated_count == 0 || params.activated_count > params.rrh_count {
            return Err(SimError::Domain(format!(
                "activated count {} out of range for {} RRHs",
                params.activated_count, params.rrh_count
            )));
        }
        let topology = build_topology(params.rrh_count, params.inter_site_distance_m)?;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(0);

        let mut activated =
            rand::seq::index::sample(&mut rng, params.rrh_count, params.activated_count).into_vec();
        activated.sort_unstable();
        let desired_rates_bps =
            assign_desired_rates(params.activated_count, &params.rate_profile, &mut rng);

        for _attempt in 0..MAX_ASSOCIATION_RETRIES {
            let ue_positions = place_ues(&topology, &activated, &mut rng)?;
            let gains = GainMatrix::compute(radio, &topology, &ue_positions)?;
            let serving_rrh = associate(&gains, &activated);
            let mut seen = std::collections::BTreeSet::new();
            if serving_rrh.iter().all(|b| seen.insert(*b)) {
                return Ok(Scenario {
                    topology,
                    activated,
                    ue_positions,
                    desired_rates_bps,
                    serving_rrh,
                    gains,
                    seed,
                });
            }
        }
        Err(SimError::AssociationConflict {
            retries: MAX_ASSOCIATION_RETRIES,
        })
    }

    pub fn ue_count(&self) -> usize {
        self.ue_positions.len()
    }

    pub fn rrh_count(&self) -> usize {
        self.topology.rrh_count()
    }

    /// Serving-link gain of a UE.
    pub fn serving_gain(&self, ue: usize) -> LinkGain {
        self.gains.gain(self.serving_rrh[ue], ue)
    }

    /// Structural consistency checks, used after deserializing a replay file.
    pub fn validate(&self) -> Result<()> {
        let b = self.rrh_count();
        let u = self.ue_count();
        if self.activated.is_empty() || self.activated.len() != u {
            return Err(SimError::InvalidArtifact(format!(
                "expected one UE per activated RRH, got {} activated / {} UEs",
                self.activated.len(),
                u
            )));
        }
        if self.activated.windows(2).any(|w| w[0] >= w[1]) || *self.activated.last().unwrap() >= b {
            return Err(SimError::InvalidArtifact(
                "activated indices must be sorted, unique, and in range".into(),
            ));
        }
        if self.desired_rates_bps.len() != u || self.serving_rrh.len() != u {
            return Err(SimError::InvalidArtifact("per-UE vectors disagree on UE count".into()));
        }
        if self.gains.rrh_count() != b || self.gains.ue_count() != u || self.gains.gains.len() != b * u
        {
            return Err(SimError::InvalidArtifact("gain matrix shape mismatch".into()));
        }
        if self.gains.gains.iter().any(|g| !g.is_finite() || *g <= 0.0) {
            return Err(SimError::InvalidArtifact("gains must be positive and finite".into()));
        }
        if self
            .ue_positions
            .iter()
            .chain(&self.topology.rrh_positions)
            .any(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(SimError::InvalidArtifact("positions must be finite".into()));
        }
        if self
            .desired_rates_bps
            .iter()
            .any(|r| !r.is_finite() || *r <= 0.0)
        {
            return Err(SimError::InvalidArtifact("desired rates must be positive".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        if !self
            .serving_rrh
            .iter()
            .all(|b| self.activated.binary_search(b).is_ok() && seen.insert(*b))
        {
            return Err(SimError::InvalidArtifact(
                "serving assignment must be a bijection onto the activated set".into(),
            ));
        }
        if !self.topology.inter_site_distance_m.is_finite() || self.topology.inter_site_distance_m <= 0.0 {
            return Err(SimError::InvalidArtifact("inter-site distance must be positive".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Scenario> {
        let scenario: Scenario = serde_json::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }
}

/// Derives the episode RNG for a scenario seed (a separate stream from the
/// one that drew the instance, so the two never alias).
pub fn episode_rng(seed: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

// --- network state ---------------------------------------------------------------

/// Per-RRH downlink powers for one instant of a scheme's execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkState {
    /// One entry per RRH in the topology (activated or not).
    pub powers: Vec<PowerDbw>,
}

impl NetworkState {
    /// Every activated RRH at `p_max`, every dormant RRH OFF.
    pub fn activation_start(scenario: &Scenario, radio: &RadioConfig) -> NetworkState {
        let mut powers = vec![PowerDbw::Off; scenario.rrh_count()];
        for &b in &scenario.activated {
            powers[b] = radio.p_max();
        }
        NetworkState { powers }
    }

    /// Interference at a UE in watts: activated RRHs other than the serving one.
    pub fn interference_at(&self, scenario: &Scenario, ue: usize) -> f64 {
        scenario
            .activated
            .iter()
            .filter(|&&b| b != scenario.serving_rrh[ue])
            .map(|&b| radio::rsrp_watts(self.powers[b], scenario.gains.gain(b, ue)))
            .sum()
    }

    /// Serving-link received power at a UE.
    pub fn rsrp_at(&self, scenario: &Scenario, ue: usize) -> PowerDbw {
        radio::rsrp_dbw(self.powers[scenario.serving_rrh[ue]], scenario.serving_gain(ue))
    }

    pub fn sinr_at(&self, scenario: &Scenario, radio_cfg: &RadioConfig, ue: usize) -> f64 {
        let serving = radio::rsrp_watts(self.powers[scenario.serving_rrh[ue]], scenario.serving_gain(ue));
        serving / (self.interference_at(scenario, ue) + radio_cfg.noise_watts())
    }

    pub fn throughput_at(&self, scenario: &Scenario, radio_cfg: &RadioConfig, ue: usize) -> f64 {
        radio_cfg.bandwidth_hz * (1.0 + self.sinr_at(scenario, radio_cfg, ue)).log2()
    }

    /// Throughput of every UE, in bit/s.
    pub fn throughputs(&self, scenario: &Scenario, radio_cfg: &RadioConfig) -> Vec<f64> {
        (0..scenario.ue_count())
            .map(|u| self.throughput_at(scenario, radio_cfg, u))
            .collect()
    }
}

// --- tests ------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    fn scenario_i_params() -> ScenarioParams {
        ScenarioParams {
            rrh_count: 57,
            inter_site_distance_m: 200.0,
            activated_count: 11,
            rate_profile: RateProfile::default(),
        }
    }

    #[test]
    fn topology_has_requested_count_and_centre_first() {
        let topo = build_topology(57, 200.0).unwrap();
        assert_eq!(topo.rrh_count(), 57);
        assert_eq!(topo.rrh_positions[0], Point { x: 0.0, y: 0.0 });
    }

    #[test]
    fn topology_nearest_neighbour_spacing_is_exact() {
        for count in [2usize, 7, 19, 37, 57, 111] {
            let d = 200.0;
            let topo = build_topology(count, d).unwrap();
            for (i, a) in topo.rrh_positions.iter().enumerate() {
                let nearest = topo
                    .rrh_positions
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, b)| a.distance(*b))
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    (nearest - d).abs() < 1e-6,
                    "site {i} of {count}: nearest neighbour at {nearest}, want {d}"
                );
            }
        }
    }

    #[test]
    fn topology_rings_fill_before_truncation() {
        // Complete rings hold 1, 7, 19, 37 sites; 57 truncates the 4th ring.
        let topo = build_topology(57, 200.0).unwrap();
        let origin = Point { x: 0.0, y: 0.0 };
        for (i, p) in topo.rrh_positions.iter().enumerate() {
            let ring = match i {
                0 => 0.0,
                1..=6 => 1.0,
                7..=18 => 2.0,
                19..=36 => 3.0,
                _ => 4.0,
            };
            let radial = origin.distance(*p);
            assert!(
                radial <= ring * 200.0 + 1e-6 && radial >= ring.max(1.0) * 200.0 * 0.85 - 1e-6 || ring == 0.0,
                "site {i} at radius {radial} inconsistent with ring {ring}"
            );
        }
    }

    #[test]
    fn topology_rejects_degenerate_inputs() {
        assert!(build_topology(0, 200.0).is_err());
        assert!(build_topology(5, 0.0).is_err());
        assert!(build_topology(5, -1.0).is_err());
    }

    #[test]
    fn rate_draws_stay_on_support_with_even_mean() {
        let profile = RateProfile::default();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let rates = assign_desired_rates(10_000, &profile, &mut rng);
        let mut sum = 0.0;
        for r in &rates {
            let mbps = r / 1.0e6;
            assert!(
                profile.values_mbps.iter().any(|v| (*v - mbps).abs() < 1e-12),
                "rate {mbps} Mb/s off-support"
            );
            sum += mbps;
        }
        let mean = sum / rates.len() as f64;
        assert!((mean - 11.0).abs() < 0.5, "support mean drifted: {mean}");
    }

    #[test]
    fn degenerate_rate_profile_is_constant() {
        let profile = RateProfile {
            values_mbps: vec![6.0],
        };
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        assert!(assign_desired_rates(100, &profile, &mut rng)
            .iter()
            .all(|r| *r == 6.0e6));
    }

    #[test]
    fn rate_profile_validation() {
        assert!(RateProfile { values_mbps: vec![] }.validate().is_err());
        assert!(RateProfile {
            values_mbps: vec![2.0, -1.0]
        }
        .validate()
        .is_err());
        assert!(RateProfile::default().validate().is_ok());
    }

    #[test]
    fn ue_placement_respects_annulus() {
        let topo = build_topology(57, 200.0).unwrap();
        let activated: Vec<usize> = (0..57).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mut radius_sum = 0.0;
        let mut n = 0usize;
        for _ in 0..200 {
            let ues = place_ues(&topo, &activated, &mut rng).unwrap();
            for (i, ue) in ues.iter().enumerate() {
                let r = topo.rrh_positions[activated[i]].distance(*ue);
                assert!(
                    (MIN_UE_DISTANCE_M..=100.0 + 1e-9).contains(&r),
                    "UE at radius {r} outside [10, 100]"
                );
                radius_sum += r;
                n += 1;
            }
        }
        // Uniform-on-annulus mean radius: 2(R³−r³)/(3(R²−r²)) ≈ 67.27 m.
        let mean = radius_sum / n as f64;
        assert!((mean - 67.27).abs() < 1.0, "annulus mean radius drifted: {mean}");
    }

    #[test]
    fn placement_needs_room() {
        let topo = build_topology(7, 20.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        assert!(place_ues(&topo, &[0], &mut rng).is_err());
    }

    #[test]
    fn association_picks_strongest_gain_with_low_index_ties() {
        let gains = GainMatrix {
            rrh_count: 3,
            ue_count: 2,
            // UE0: equal best gain from RRH0 and RRH2 → tie to RRH0.
            // UE1: strongest from RRH2.
            gains: vec![
                5e-3, 1e-4, // RRH0
                1e-3, 2e-4, // RRH1
                5e-3, 9e-4, // RRH2
            ],
        };
        assert_eq!(associate(&gains, &[0, 1, 2]), vec![0, 2]);
        // Restricting the activated set must restrict the candidates.
        assert_eq!(associate(&gains, &[1, 2]), vec![2, 2]);
    }

    #[test]
    fn generate_yields_valid_bijective_scenarios() {
        let radio = RadioConfig::default();
        let params = scenario_i_params();
        let mut own_cell = 0usize;
        let mut total = 0usize;
        for seed in 0..20 {
            let sc = Scenario::generate(&params, &radio, seed).unwrap();
            sc.validate().unwrap();
            assert_eq!(sc.ue_count(), 11);
            assert_eq!(sc.rrh_count(), 57);
            for (i, &b) in sc.serving_rrh.iter().enumerate() {
                total += 1;
                if b == sc.activated[i] {
                    own_cell += 1;
                }
            }
        }
        let frac = own_cell as f64 / total as f64;
        assert!(frac >= 0.95, "UEs served by their own RRH only {frac:.3} of the time");
    }

    #[test]
    fn generate_is_deterministic_per_seed() {
        let radio = RadioConfig::default();
        let params = scenario_i_params();
        let a = Scenario::generate(&params, &radio, 99).unwrap();
        let b = Scenario::generate(&params, &radio, 99).unwrap();
        let c = Scenario::generate(&params, &radio, 100).unwrap();
        assert_eq!(a, b, "same seed must reproduce the instance");
        assert_ne!(a, c, "different seeds must differ");
    }

    #[test]
    fn scenario_json_round_trip_is_exact() {
        let radio = RadioConfig::default();
        let sc = Scenario::generate(&scenario_i_params(), &radio, 7).unwrap();
        let json = sc.to_json().unwrap();
        let back = Scenario::from_json(&json).unwrap();
        assert_eq!(sc, back);
    }

    #[test]
    fn from_json_rejects_inconsistent_documents() {
        let radio = RadioConfig::default();
        let mut sc = Scenario::generate(&scenario_i_params(), &radio, 7).unwrap();
        sc.serving_rrh[0] = sc.serving_rrh[1]; // breaks the bijection
        let json = serde_json::to_string(&sc).unwrap();
        assert!(Scenario::from_json(&json).is_err());
    }

    #[test]
    fn activation_start_state_and_interference() {
        let radio = RadioConfig::default();
        let sc = Scenario::generate(&scenario_i_params(), &radio, 1).unwrap();
        let state = NetworkState::activation_start(&sc, &radio);
        for (b, p) in state.powers.iter().enumerate() {
            if sc.activated.contains(&b) {
                assert_eq!(*p, PowerDbw::Dbw(15.2));
            } else {
                assert_eq!(*p, PowerDbw::Off);
            }
        }
        // Hand-summed interference for UE 0.
        let expected: f64 = sc
            .activated
            .iter()
            .filter(|&&b| b != sc.serving_rrh[0])
            .map(|&b| state.powers[b].watts() * sc.gains.gain(b, 0).linear())
            .sum();
        let got = state.interference_at(&sc, 0);
        assert!((got - expected).abs() <= 1e-18 + 1e-12 * expected.abs());

        // Dormant RRH powers never radiate: booking sleep power for them must
        // not change any UE's interference or throughput.
        let mut sleeping = state.clone();
        for b in 0..sc.rrh_count() {
            if !sc.activated.contains(&b) {
                sleeping.powers[b] = PowerDbw::Dbw(radio.p_max_dbw - 10.0);
            }
        }
        for u in 0..sc.ue_count() {
            assert_eq!(
                state.interference_at(&sc, u),
                sleeping.interference_at(&sc, u),
                "sleeping dormant RRHs leaked interference at UE {u}"
            );
        }
    }

    #[test]
    fn episode_rng_differs_from_generation_stream() {
        let mut gen0 = ChaCha12Rng::seed_from_u64(5);
        gen0.set_stream(0);
        let mut epi = episode_rng(5);
        let a: u64 = gen0.next_u64();
        let b: u64 = epi.next_u64();
        assert_ne!(a, b, "scenario and episode streams must not alias");
    }
}
