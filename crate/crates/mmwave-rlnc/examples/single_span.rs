//! One device, one time span: forwarding vs network coding over the
//! same set of usable links.
//!
//! Run with: cargo run --release --example single_span

use mmwave_rlnc::config::rng_for;
use mmwave_rlnc::gf::FieldContext;
use mmwave_rlnc::sim::{downlink_forwarding, downlink_nc};

fn main() {
    let field = FieldContext::new(1024).unwrap();
    let usable = [0.05, 0.3, 0.7];
    let k = 8;
    println!("usable link erasures: {usable:?}, {k} packets to deliver\n");

    let mut rng = rng_for(42, &[1]);
    for span in 0..5 {
        let fwd = downlink_forwarding(k, &usable, &mut rng).unwrap();
        let nc = downlink_nc(&field, k, &usable, &mut rng).unwrap();
        println!(
            "span {span}: forwarding {:>2} slots (eff {:.3}) | network coding {:>2} slots (eff {:.3})",
            fwd.slots_to_complete,
            fwd.efficiency(),
            nc.slots_to_complete,
            nc.efficiency()
        );
    }

    // Longer horizon: the averages tell the real story.
    let spans = 20_000;
    let (mut air_f, mut air_c) = (0u64, 0u64);
    for _ in 0..spans {
        air_f += downlink_forwarding(k, &usable, &mut rng)
            .unwrap()
            .air_transmissions;
        air_c += downlink_nc(&field, k, &usable, &mut rng)
            .unwrap()
            .air_transmissions;
    }
    let eff_f = (k as u64 * spans) as f64 / air_f as f64;
    let eff_c = (k as u64 * spans) as f64 / air_c as f64;
    println!(
        "\nover {spans} spans: forwarding {eff_f:.4}, network coding {eff_c:.4} (+{:.1}%)",
        (eff_c / eff_f - 1.0) * 100.0
    );
}
