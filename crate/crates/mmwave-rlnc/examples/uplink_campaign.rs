//! Run the uplink backhaul campaign for two code lengths and summarize
//! the per-group backhaul efficiency medians. CSV lands under
//! results/example_uplink/.
//!
//! Run with: cargo run --release --example uplink_campaign

use mmwave_rlnc::campaign::run_uplink_campaign;
use mmwave_rlnc::config::{ExperimentConfig, Scheme};

fn main() {
    for spacing in [30.0, 60.0, 80.0] {
        for z in [4u32, 8] {
            let mut config = ExperimentConfig::default();
            config.scenario.relay_spacing_m = spacing;
            config.scenario.device_count = 500;
            config.spans_per_device = 100;
            config.time_span.code_length = z;
            config.output_dir = format!("results/example_uplink/dr{spacing}_z{z}").into();

            let summary = run_uplink_campaign(&config).unwrap();
            let fwd = summary
                .median_backhaul_efficiency(Scheme::Forwarding)
                .unwrap();
            let nc = summary
                .median_backhaul_efficiency(Scheme::NetworkCoding)
                .unwrap();
            println!(
                "D_R = {spacing:>4} m, z = {z}: median backhaul efficiency \
                 forwarding {fwd:.4}, network coding {nc:.4} ({:+.1}%), \
                 {} undecodable spans",
                (nc / fwd - 1.0) * 100.0,
                summary.undecodable_spans
            );
        }
    }
}
