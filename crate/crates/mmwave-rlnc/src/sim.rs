//! Per-time-span execution of the Forwarding and Network-Coding
//! schedulers.
//!
//! Downlink: k packets are pushed to one device through its usable
//! relays. Forwarding picks a relay uniformly per packet and repeats
//! until delivery; network coding sends a fresh coded packet through a
//! uniformly chosen relay until the device's decoder reaches rank k.
//!
//! Uplink: each of z devices broadcasts its packet until some relay
//! holds it; relays then either forward every copy they hold (no
//! coordination between relays) or send network-coded combinations
//! round-robin until the network-side decoder reaches rank z, skipping
//! relays that can no longer contribute anything new.
//!
//! One air transmission occupies one time slot, so the slot count of a
//! span equals its transmission count. Transmission counts are what the
//! efficiency metrics divide by.

use crate::gf::{FieldContext, FieldElement};
use crate::rlnc::Decoder;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("no usable link: the time span is in outage")]
    NoUsableLinks,
    #[error("device {0} has every link in outage")]
    DeviceUnreachable(usize),
    #[error("received packets do not cover all sources: span is undecodable")]
    UndecodableSpan,
}

/// k packets per downlink span, z devices combined per uplink span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TimeSpanConfig {
    pub packets_per_span: u32,
    pub code_length: u32,
}

/// Counts collected over one time span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunMetrics {
    pub air_transmissions: u64,
    pub backhaul_transmissions: u64,
    pub slots_to_complete: u64,
    pub packets_delivered: u64,
}

impl RunMetrics {
    /// Packets delivered per air transmission.
    pub fn efficiency(&self) -> f64 {
        self.packets_delivered as f64 / self.air_transmissions as f64
    }

    /// Packets delivered per backhaul transmission.
    pub fn backhaul_efficiency(&self) -> f64 {
        self.packets_delivered as f64 / self.backhaul_transmissions as f64
    }
}

/// Forwarding downlink: per packet, a uniformly chosen relay transmits
/// until the packet gets through.
pub fn downlink_forwarding<R: Rng + ?Sized>(
    packets: u32,
    usable_links: &[f64],
    rng: &mut R,
) -> Result<RunMetrics, SimError> {
    if usable_links.is_empty() || usable_links.iter().all(|&p| p >= 1.0) {
        return Err(SimError::NoUsableLinks);
    }
    let mut air = 0u64;
    for _ in 0..packets {
        let p = usable_links[rng.gen_range(0..usable_links.len())];
        loop {
            air += 1;
            if rng.gen_bool(1.0 - p) {
                break;
            }
        }
    }
    Ok(RunMetrics {
        air_transmissions: air,
        backhaul_transmissions: 0,
        slots_to_complete: air,
        packets_delivered: packets as u64,
    })
}

/// Network-coding downlink: fresh coded packet, uniformly chosen relay,
/// until the decoder completes. Only the encoding vectors matter for
/// the counts, so the span runs on coefficient rows without payloads.
pub fn downlink_nc<R: Rng + ?Sized>(
    field: &FieldContext,
    packets: u32,
    usable_links: &[f64],
    rng: &mut R,
) -> Result<RunMetrics, SimError> {
    if usable_links.is_empty() || usable_links.iter().all(|&p| p >= 1.0) {
        return Err(SimError::NoUsableLinks);
    }
    let k = packets as usize;
    let mut decoder = Decoder::new(field, k);
    let mut coeffs = vec![FieldElement::ZERO; k];
    let mut air = 0u64;
    while !decoder.is_complete() {
        // Fresh combination per attempt; an all-zero vector would waste
        // the slot, so it is redrawn before transmission.
        loop {
            for c in coeffs.iter_mut() {
                *c = field.sample_uniform(rng);
            }
            if coeffs.iter().any(|c| !c.is_zero()) {
                break;
            }
        }
        let p = usable_links[rng.gen_range(0..usable_links.len())];
        air += 1;
        if rng.gen_bool(1.0 - p) {
            decoder.add_row(&coeffs, &[]).expect("dimension matches");
        }
    }
    Ok(RunMetrics {
        air_transmissions: air,
        backhaul_transmissions: 0,
        slots_to_complete: air,
        packets_delivered: packets as u64,
    })
}

/// Which relays hold which packets after the uplink air phase.
#[derive(Debug, Clone)]
pub struct DevicePhase {
    /// `holds[device][relay]`
    pub holds: Vec<Vec<bool>>,
    pub air_transmissions: u64,
    /// Devices whose links were all in outage; their packets are absent.
    pub excluded: Vec<usize>,
}

impl DevicePhase {
    pub fn relay_count(&self) -> usize {
        self.holds.first().map_or(0, |h| h.len())
    }

    /// Mask of packets held by one relay.
    pub fn relay_mask(&self, relay: usize) -> Vec<bool> {
        self.holds.iter().map(|device| device[relay]).collect()
    }
}

/// Each device broadcasts its packet, retransmitting until at least one
/// relay receives it; every relay that received during the stopping
/// attempt holds a copy. Devices with no usable link are excluded and
/// reported rather than looping forever.
pub fn uplink_device_phase<R: Rng + ?Sized>(erasures: &[Vec<f64>], rng: &mut R) -> DevicePhase {
    let relays = erasures.first().map_or(0, |r| r.len());
    let mut holds = vec![vec![false; relays]; erasures.len()];
    let mut air = 0u64;
    let mut excluded = Vec::new();
    for (device, row) in erasures.iter().enumerate() {
        if row.iter().all(|&p| p >= 1.0) {
            excluded.push(device);
            continue;
        }
        loop {
            air += 1;
            let mut any = false;
            for (relay, &p) in row.iter().enumerate() {
                if p < 1.0 && rng.gen_bool(1.0 - p) {
                    holds[device][relay] = true;
                    any = true;
                }
            }
            if any {
                break;
            }
        }
    }
    DevicePhase {
        holds,
        air_transmissions: air,
        excluded,
    }
}

/// Forwarding backhaul: every relay forwards every packet it holds; no
/// relay knows what the others received, so duplicates all go out.
pub fn uplink_forwarding_backhaul(phase: &DevicePhase) -> u64 {
    phase
        .holds
        .iter()
        .map(|relays| relays.iter().filter(|&&h| h).count() as u64)
        .sum()
}

/// Network-coding backhaul: relays send coded packets round-robin
/// (busiest relay first) into a network-side decoder until rank z. A
/// relay whose held packets are already spanned by the decoder cannot
/// produce anything innovative and is skipped, so redundant
/// transmissions never happen.
pub fn uplink_nc_backhaul<R: Rng + ?Sized>(
    field: &FieldContext,
    phase: &DevicePhase,
    rng: &mut R,
) -> Result<u64, SimError> {
    let z = phase.holds.len();
    // Union coverage: every packet must sit at some relay.
    if phase.holds.iter().any(|relays| !relays.iter().any(|&h| h)) {
        return Err(SimError::UndecodableSpan);
    }
    let mut order: Vec<usize> = (0..phase.relay_count()).collect();
    let held_counts: Vec<usize> = (0..phase.relay_count())
        .map(|r| phase.holds.iter().filter(|device| device[r]).count())
        .collect();
    order.sort_by_key(|&r| std::cmp::Reverse(held_counts[r]));
    order.retain(|&r| held_counts[r] > 0);

    let mut decoder = Decoder::new(field, z);
    let mut transmissions = 0u64;
    let mut unit = vec![FieldElement::ZERO; z];
    while !decoder.is_complete() {
        let mut progressed = false;
        for &relay in &order {
            if decoder.is_complete() {
                break;
            }
            // Genie check: can this relay's subspace still add rank?
            let mask = phase.relay_mask(relay);
            let can_contribute = mask.iter().enumerate().any(|(i, &held)| {
                if !held {
                    return false;
                }
                unit.iter_mut().for_each(|x| *x = FieldElement::ZERO);
                unit[i] = FieldElement::ONE;
                decoder.is_innovative(&unit)
            });
            if !can_contribute {
                continue;
            }
            let coeffs: Vec<FieldElement> = mask
                .iter()
                .map(|&held| {
                    if held {
                        field.sample_uniform_nonzero(rng)
                    } else {
                        FieldElement::ZERO
                    }
                })
                .collect();
            transmissions += 1;
            progressed = true;
            decoder.add_row(&coeffs, &[]).expect("dimension matches");
        }
        debug_assert!(progressed, "union covered but no relay can progress");
        if !progressed {
            return Err(SimError::UndecodableSpan);
        }
    }
    Ok(transmissions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf1024() -> FieldContext {
        FieldContext::new(1024).unwrap()
    }

    #[test]
    fn run_metrics_ratios() {
        let m = RunMetrics {
            air_transmissions: 10,
            backhaul_transmissions: 8,
            slots_to_complete: 10,
            packets_delivered: 4,
        };
        assert!((m.efficiency() - 0.4).abs() < 1e-12);
        assert!((m.backhaul_efficiency() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn forwarding_error_free_uses_one_slot_per_packet() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let m = downlink_forwarding(6, &[0.0, 0.0, 0.0], &mut rng).unwrap();
        assert_eq!(m.air_transmissions, 6);
        assert_eq!(m.slots_to_complete, 6);
        assert_eq!(m.efficiency(), 1.0);
    }

    #[test]
    fn forwarding_outage_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        assert_eq!(
            downlink_forwarding(4, &[], &mut rng).unwrap_err(),
            SimError::NoUsableLinks
        );
        assert_eq!(
            downlink_forwarding(4, &[1.0, 1.0], &mut rng).unwrap_err(),
            SimError::NoUsableLinks
        );
    }

    #[test]
    fn forwarding_geometric_mean_attempts() {
        // Single relay at p = 0.5: two transmissions per packet on average.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let spans = 10_000;
        let mut total = 0u64;
        for _ in 0..spans {
            total += downlink_forwarding(1, &[0.5], &mut rng)
                .unwrap()
                .air_transmissions;
        }
        let mean = total as f64 / spans as f64;
        // Geometric with success 0.5: mean 2, variance 2.
        let sigma = (2.0f64 / spans as f64).sqrt();
        assert!((mean - 2.0).abs() < 3.0 * sigma, "mean={mean}");
    }

    #[test]
    fn forwarding_matches_closed_form_efficiency() {
        // N=2, p=(0.1,0.1), k=4: efficiency 0.9.
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let spans = 10_000;
        let mut air = 0u64;
        for _ in 0..spans {
            air += downlink_forwarding(4, &[0.1, 0.1], &mut rng)
                .unwrap()
                .air_transmissions;
        }
        let eff = (4 * spans) as f64 / air as f64;
        assert!((eff - 0.9).abs() < 0.01, "eff={eff}");
    }

    #[test]
    fn nc_error_free_is_nearly_k_transmissions() {
        let gf = gf1024();
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let spans = 2_000;
        let k = 8;
        let mut air = 0u64;
        for _ in 0..spans {
            let m = downlink_nc(&gf, k, &[0.0, 0.0], &mut rng).unwrap();
            assert!(m.air_transmissions >= k as u64);
            air += m.air_transmissions;
        }
        let mean = air as f64 / spans as f64;
        // Non-innovative receptions occur with probability ~1/q.
        assert!(mean <= k as f64 * (1.0 + 2.0 / 1024.0), "mean={mean}");
    }

    #[test]
    fn nc_single_packet_matches_weighted_success() {
        let gf = gf1024();
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let spans = 10_000;
        let mut air = 0u64;
        for _ in 0..spans {
            air += downlink_nc(&gf, 1, &[0.2, 0.4], &mut rng)
                .unwrap()
                .air_transmissions;
        }
        let eff = spans as f64 / air as f64;
        // k=1: success probability per attempt is the average (1-p).
        assert!((eff - 0.7).abs() < 0.02, "eff={eff}");
    }

    #[test]
    fn nc_beats_forwarding_symmetric_within_error() {
        let gf = gf1024();
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for &p in &[0.3, 0.6] {
            let links = vec![p; 4];
            let spans = 4_000;
            let (mut air_f, mut air_c) = (0u64, 0u64);
            for _ in 0..spans {
                air_f += downlink_forwarding(8, &links, &mut rng)
                    .unwrap()
                    .air_transmissions;
                air_c += downlink_nc(&gf, 8, &links, &mut rng)
                    .unwrap()
                    .air_transmissions;
            }
            let eff_f = (8 * spans) as f64 / air_f as f64;
            let eff_c = (8 * spans) as f64 / air_c as f64;
            assert!(eff_c >= eff_f - 0.02, "p={p}: eff_c={eff_c} eff_f={eff_f}");
        }
    }

    #[test]
    fn device_phase_error_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        let phase = uplink_device_phase(&[vec![0.0, 0.0, 0.0]], &mut rng);
        assert_eq!(phase.air_transmissions, 1);
        assert!(phase.holds[0].iter().all(|&h| h));
        assert!(phase.excluded.is_empty());
    }

    #[test]
    fn device_phase_mean_attempts() {
        // Two relays at p = 0.5: mean attempts 1/(1-0.25) = 4/3.
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let spans = 10_000;
        let mut total = 0u64;
        for _ in 0..spans {
            total += uplink_device_phase(&[vec![0.5, 0.5]], &mut rng).air_transmissions;
        }
        let mean = total as f64 / spans as f64;
        assert!((mean - 4.0 / 3.0).abs() < 0.02, "mean={mean}");
    }

    #[test]
    fn device_phase_single_weak_relay() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let spans = 5_000;
        let mut total = 0u64;
        for _ in 0..spans {
            total += uplink_device_phase(&[vec![0.9]], &mut rng).air_transmissions;
        }
        let mean = total as f64 / spans as f64;
        let sigma = (0.9f64 / 0.01 / spans as f64).sqrt();
        assert!((mean - 10.0).abs() < 4.0 * sigma, "mean={mean}");
    }

    #[test]
    fn device_phase_excludes_unreachable() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let phase = uplink_device_phase(&[vec![1.0, 1.0], vec![0.0, 1.0]], &mut rng);
        assert_eq!(phase.excluded, vec![0]);
        assert!(phase.holds[0].iter().all(|&h| !h));
        assert!(phase.holds[1][0]);
    }

    #[test]
    fn forwarding_backhaul_counts_every_copy() {
        let phase = DevicePhase {
            holds: vec![vec![true, true], vec![true, false], vec![false, false]],
            air_transmissions: 3,
            excluded: vec![2],
        };
        assert_eq!(uplink_forwarding_backhaul(&phase), 3);
        let empty = DevicePhase {
            holds: vec![vec![false; 2]; 2],
            air_transmissions: 0,
            excluded: vec![0, 1],
        };
        assert_eq!(uplink_forwarding_backhaul(&empty), 0);
    }

    #[test]
    fn nc_backhaul_one_relay_holds_all() {
        let gf = gf1024();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let phase = DevicePhase {
            holds: vec![vec![true, false]; 4],
            air_transmissions: 4,
            excluded: vec![],
        };
        // Rank z requires z rows from the only holder; its coefficients
        // are nonzero on all four packets so each row is innovative
        // unless the draw is unlucky, which the count reflects.
        let tx = uplink_nc_backhaul(&gf, &phase, &mut rng).unwrap();
        assert_eq!(tx, 4);
    }

    #[test]
    fn nc_backhaul_distinct_singletons() {
        let gf = gf1024();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        // Packet i held exactly at relay i: z transmissions, one each.
        let phase = DevicePhase {
            holds: (0..4).map(|i| (0..4).map(|r| r == i).collect()).collect(),
            air_transmissions: 4,
            excluded: vec![],
        };
        assert_eq!(uplink_nc_backhaul(&gf, &phase, &mut rng).unwrap(), 4);
    }

    #[test]
    fn nc_backhaul_skips_redundant_singleton() {
        let gf = gf1024();
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        // Relay 1 holds everything; relay 0 holds only packet 0. After
        // relay 1 exhausts the span, relay 0's [c,0,0,0] would be
        // redundant and must be skipped, leaving exactly 4 sends.
        let mut holds = vec![vec![false, true]; 4];
        holds[0][0] = true;
        let phase = DevicePhase {
            holds,
            air_transmissions: 4,
            excluded: vec![],
        };
        let tx = uplink_nc_backhaul(&gf, &phase, &mut rng).unwrap();
        assert_eq!(tx, 4);
    }

    #[test]
    fn nc_backhaul_undecodable_without_coverage() {
        let gf = gf1024();
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let phase = DevicePhase {
            holds: vec![vec![true, false], vec![false, false]],
            air_transmissions: 1,
            excluded: vec![1],
        };
        assert_eq!(
            uplink_nc_backhaul(&gf, &phase, &mut rng).unwrap_err(),
            SimError::UndecodableSpan
        );
    }

    #[test]
    fn nc_backhaul_never_below_z_and_forwarding_never_below() {
        // With full coverage, NC needs at least z sends and never more
        // than forwarding, which ships every duplicate.
        let gf = gf1024();
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for _ in 0..500 {
            let z = 4;
            let erasures: Vec<Vec<f64>> = (0..z).map(|_| vec![0.4; 6]).collect();
            let phase = uplink_device_phase(&erasures, &mut rng);
            if phase.holds.iter().any(|h| !h.iter().any(|&x| x)) {
                continue;
            }
            let nc = uplink_nc_backhaul(&gf, &phase, &mut rng).unwrap();
            let fwd = uplink_forwarding_backhaul(&phase);
            assert!(nc >= z as u64);
            assert!(nc <= fwd.max(z as u64) + z as u64);
        }
    }
}
