//! Link abstraction: geometry in, packet erasure probability out.
//!
//! Each device-relay link is in one of three states (line-of-sight,
//! non-line-of-sight, outage) drawn from a distance-dependent
//! distribution. Non-outage links get an SNR from the link budget and a
//! log-distance path-loss model, the SNR maps to a bit error rate for
//! the configured modulation, and the block error rate over the
//! configured block length becomes the packet erasure probability. A
//! link whose erasure probability exceeds the threshold is reclassified
//! as outage and never used.
//!
//! The default numeric coefficients (state-probability curve and
//! path-loss intercept/exponent/shadowing per state) ship in the
//! experiment config; they describe a 28 GHz urban street deployment
//! and can be replaced wholesale from the config file.

use crate::deployment::Position;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("no SNR is defined for a link in outage")]
    SnrInOutage,
    #[error("erasure threshold {0} must lie in (0, 1]")]
    BadThreshold(f64),
    #[error("block length must be at least 1")]
    BadBlockLength,
    #[error("{0} positions are required")]
    EmptyPositions(&'static str),
}

/// Modulation of the air-interface transmissions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modulation {
    Qpsk,
    Qam64,
}

/// Transmit-side and noise figures of one direction, all in dB-domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub beamforming_gain_db: f64,
    pub coding_gain_db: f64,
    pub noise_power_dbm: f64,
    pub noise_figure_db: f64,
    pub modulation: Modulation,
    pub block_length_bits: u32,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.block_length_bits == 0 {
            return Err(ChannelError::BadBlockLength);
        }
        Ok(())
    }

    /// 30 dBm, 20 dB beam-forming, 64QAM: the downlink defaults.
    pub fn downlink_default() -> Self {
        LinkBudget {
            tx_power_dbm: 30.0,
            beamforming_gain_db: 20.0,
            coding_gain_db: 6.0,
            noise_power_dbm: -87.0,
            noise_figure_db: 5.0,
            modulation: Modulation::Qam64,
            block_length_bits: 10_000,
        }
    }

    /// 20 dBm, no beam-forming gain, QPSK: the uplink defaults.
    pub fn uplink_default() -> Self {
        LinkBudget {
            tx_power_dbm: 20.0,
            beamforming_gain_db: 0.0,
            coding_gain_db: 6.0,
            noise_power_dbm: -87.0,
            noise_figure_db: 5.0,
            modulation: Modulation::Qpsk,
            block_length_bits: 10_000,
        }
    }
}

/// Log-distance path loss for one link state:
/// PL(d) = intercept + 10 * exponent * log10(d), plus zero-mean normal
/// shadowing in dB when sigma > 0. Distances below 1 m evaluate at the
/// 1 m reference point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    pub intercept_db: f64,
    pub exponent: f64,
    pub shadowing_sigma_db: f64,
}

/// Distance-based state probabilities:
///   P(outage) = max(0, 1 - exp(-d * outage_rate + outage_offset))
///   P(LOS)    = (1 - P(outage)) * exp(-d * los_rate)
///   P(NLOS)   = the rest.
/// This is a valid distribution at every distance by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateProbParams {
    pub outage_rate_per_m: f64,
    pub outage_offset: f64,
    pub los_rate_per_m: f64,
}

impl StateProbParams {
    /// (P(outage), P(LOS), P(NLOS)) at the given distance.
    pub fn probabilities(&self, distance_m: f64) -> (f64, f64, f64) {
        let p_out = (1.0 - (-distance_m * self.outage_rate_per_m + self.outage_offset).exp())
            .clamp(0.0, 1.0);
        let p_los = (1.0 - p_out) * (-distance_m * self.los_rate_per_m).exp();
        let p_nlos = (1.0 - p_out - p_los).max(0.0);
        (p_out, p_los, p_nlos)
    }
}

/// Everything the channel needs beyond the link budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub carrier_ghz: f64,
    /// Links with erasure probability above this are treated as outage.
    pub erasure_threshold: f64,
    pub state_probs: StateProbParams,
    pub pathloss_los: PathLossParams,
    pub pathloss_nlos: PathLossParams,
    /// When set, every link is forced to LOS with this erasure
    /// probability (synthetic-channel campaigns and tests).
    #[serde(default)]
    pub erasure_override: Option<f64>,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.erasure_threshold > 0.0 && self.erasure_threshold <= 1.0) {
            return Err(ChannelError::BadThreshold(self.erasure_threshold));
        }
        Ok(())
    }

    /// 28 GHz street-canyon defaults; threshold 0.9.
    pub fn default_28ghz() -> Self {
        ChannelParams {
            carrier_ghz: 28.0,
            erasure_threshold: 0.9,
            state_probs: StateProbParams {
                outage_rate_per_m: 1.0 / 30.0,
                outage_offset: 5.2,
                los_rate_per_m: 1.0 / 67.1,
            },
            pathloss_los: PathLossParams {
                intercept_db: 61.4,
                exponent: 2.0,
                shadowing_sigma_db: 5.8,
            },
            pathloss_nlos: PathLossParams {
                intercept_db: 72.0,
                exponent: 2.92,
                shadowing_sigma_db: 8.7,
            },
            erasure_override: None,
        }
    }

    /// Device-side reception placeholder for the downlink direction:
    /// the handset array sits in hand-and-body clutter, so its
    /// effective loss intercepts are much higher than the street-edge
    /// relay antennas see on the uplink.
    pub fn default_28ghz_device_side() -> Self {
        ChannelParams {
            pathloss_los: PathLossParams {
                intercept_db: 92.0,
                exponent: 2.0,
                shadowing_sigma_db: 5.8,
            },
            pathloss_nlos: PathLossParams {
                intercept_db: 98.0,
                exponent: 2.0,
                shadowing_sigma_db: 8.7,
            },
            ..ChannelParams::default_28ghz()
        }
    }
}

/// The sampled condition of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkyState {
    Outage,
    Los,
    Nlos,
}

/// A link's state and the erasure probability it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub state: SkyState,
    pub erasure: f64,
}

impl LinkState {
    pub const OUTAGE: LinkState = LinkState {
        state: SkyState::Outage,
        erasure: 1.0,
    };

    pub fn usable(&self) -> bool {
        self.state != SkyState::Outage
    }
}

/// Draw the link state from the three-point distribution at `distance_m`.
pub fn sample_link_state<R: Rng + ?Sized>(
    distance_m: f64,
    params: &ChannelParams,
    rng: &mut R,
) -> SkyState {
    let (p_out, p_los, _) = params.state_probs.probabilities(distance_m);
    let roll: f64 = rng.gen();
    if roll < p_out {
        SkyState::Outage
    } else if roll < p_out + p_los {
        SkyState::Los
    } else {
        SkyState::Nlos
    }
}

/// Deterministic path loss (no shadowing) for a non-outage state.
pub fn pathloss_db(
    distance_m: f64,
    state: SkyState,
    params: &ChannelParams,
) -> Result<f64, ChannelError> {
    let pl = match state {
        SkyState::Los => params.pathloss_los,
        SkyState::Nlos => params.pathloss_nlos,
        SkyState::Outage => return Err(ChannelError::SnrInOutage),
    };
    let d = distance_m.max(1.0);
    Ok(pl.intercept_db + 10.0 * pl.exponent * d.log10())
}

/// SNR in dB from an explicit path loss:
/// tx + beam-forming + coding gain - PL - (noise power + noise figure).
pub fn snr_from_pathloss_db(pathloss_db: f64, budget: &LinkBudget) -> f64 {
    budget.tx_power_dbm + budget.beamforming_gain_db + budget.coding_gain_db
        - pathloss_db
        - (budget.noise_power_dbm + budget.noise_figure_db)
}

/// SNR in dB at a distance, shadowing sampled fresh per call.
pub fn snr_db<R: Rng + ?Sized>(
    distance_m: f64,
    state: SkyState,
    budget: &LinkBudget,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<f64, ChannelError> {
    let mut pl = pathloss_db(distance_m, state, params)?;
    let sigma = match state {
        SkyState::Los => params.pathloss_los.shadowing_sigma_db,
        SkyState::Nlos => params.pathloss_nlos.shadowing_sigma_db,
        SkyState::Outage => unreachable!("rejected above"),
    };
    if sigma > 0.0 {
        pl += Normal::new(0.0, sigma)
            .expect("sigma is positive")
            .sample(rng);
    }
    Ok(snr_from_pathloss_db(pl, budget))
}

/// Bit error probability at a linear SNR.
pub fn bit_error_probability(snr_linear: f64, modulation: Modulation) -> f64 {
    let p = match modulation {
        Modulation::Qpsk => 0.5 * libm::erfc(snr_linear.sqrt()),
        Modulation::Qam64 => 0.2917 * libm::erfc((9.0 * snr_linear / 63.0).sqrt()),
    };
    p.clamp(0.0, 1.0)
}

/// Packet erasure probability: one minus the block success probability
/// (1 - p_b)^L, with the SNR converted from dB to linear before the
/// erfc expressions.
pub fn erasure_probability(snr_db: f64, budget: &LinkBudget) -> f64 {
    let snr_linear = 10f64.powf(snr_db / 10.0);
    let p_b = bit_error_probability(snr_linear, budget.modulation);
    erasure_from_bit_errors(p_b, budget.block_length_bits)
}

/// 1 - (1 - p_b)^L, evaluated in log space for tiny p_b.
pub fn erasure_from_bit_errors(p_b: f64, block_length_bits: u32) -> f64 {
    if p_b >= 1.0 {
        return 1.0;
    }
    (-(block_length_bits as f64 * (-p_b).ln_1p()).exp_m1()).clamp(0.0, 1.0)
}

/// Per-direction erasure matrix over devices (rows) and relays
/// (columns), resampled each time span.
#[derive(Debug, Clone)]
pub struct LinkMatrix {
    pub links: Vec<Vec<LinkState>>,
}

impl LinkMatrix {
    pub fn device_count(&self) -> usize {
        self.links.len()
    }

    pub fn relay_count(&self) -> usize {
        self.links.first().map_or(0, |r| r.len())
    }

    pub fn erasure_row(&self, device: usize) -> Vec<f64> {
        self.links[device].iter().map(|l| l.erasure).collect()
    }

    /// Erasures of the usable (non-outage) links of one device.
    pub fn usable_erasures(&self, device: usize) -> Vec<f64> {
        self.links[device]
            .iter()
            .filter(|l| l.usable())
            .map(|l| l.erasure)
            .collect()
    }
}

/// Sample one link end to end: state, SNR with shadowing, erasure,
/// threshold rule.
pub fn sample_link<R: Rng + ?Sized>(
    distance_m: f64,
    budget: &LinkBudget,
    params: &ChannelParams,
    rng: &mut R,
) -> LinkState {
    if let Some(p) = params.erasure_override {
        let state = if p > params.erasure_threshold {
            SkyState::Outage
        } else {
            SkyState::Los
        };
        return LinkState {
            state,
            erasure: if state == SkyState::Outage { 1.0 } else { p },
        };
    }
    let state = sample_link_state(distance_m, params, rng);
    if state == SkyState::Outage {
        return LinkState::OUTAGE;
    }
    let snr = snr_db(distance_m, state, budget, params, rng).expect("state is not outage");
    let erasure = erasure_probability(snr, budget);
    if erasure > params.erasure_threshold {
        LinkState::OUTAGE
    } else {
        LinkState { state, erasure }
    }
}

/// Build the full device-by-relay matrix for one direction. States and
/// shadowing are drawn independently per link, so calling this once per
/// time span realizes the per-span fading model.
pub fn build_link_matrix<R: Rng + ?Sized>(
    devices: &[Position],
    relays: &[Position],
    budget: &LinkBudget,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<LinkMatrix, ChannelError> {
    if devices.is_empty() {
        return Err(ChannelError::EmptyPositions("device"));
    }
    if relays.is_empty() {
        return Err(ChannelError::EmptyPositions("relay"));
    }
    let links = devices
        .iter()
        .map(|d| {
            relays
                .iter()
                .map(|r| sample_link(d.distance(*r), budget, params, rng))
                .collect()
        })
        .collect();
    Ok(LinkMatrix { links })
}
