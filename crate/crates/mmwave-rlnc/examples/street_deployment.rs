//! Lay out the street scenario and sample one span of downlink links
//! for a few devices.
//!
//! Run with: cargo run --release --example street_deployment

use mmwave_rlnc::channel::sample_link;
use mmwave_rlnc::config::{rng_for, ExperimentConfig};
use mmwave_rlnc::deployment::{drop_devices, place_relays};

fn main() {
    let mut config = ExperimentConfig::default();
    config.scenario.device_count = 5;
    let scenario = &config.scenario;

    let relays = place_relays(scenario).unwrap();
    println!(
        "street: {} m long, {} m wide, {} relays every {} m (staggered)",
        scenario.street_length_m(),
        scenario.street_width_m,
        scenario.relay_count,
        scenario.relay_spacing_m
    );
    for (i, r) in relays.iter().enumerate() {
        println!("  relay {i}: ({:>6.1}, {:>4.1})", r.x, r.y);
    }

    let mut rng = rng_for(config.base_seed, &[0xDE40]);
    let devices = drop_devices(scenario, &mut rng).unwrap();
    for (i, d) in devices.iter().enumerate() {
        println!("device {i} at ({:.1}, {:.1}):", d.x, d.y);
        for (j, r) in relays.iter().enumerate() {
            let link = sample_link(
                d.distance(*r),
                &config.downlink_budget,
                config.downlink_channel(),
                &mut rng,
            );
            println!(
                "  relay {j}: {:>5.1} m  {:?} erasure {:.4}",
                d.distance(*r),
                link.state,
                link.erasure
            );
        }
    }
}
