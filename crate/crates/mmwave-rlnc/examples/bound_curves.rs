//! Downlink efficiency bounds: forwarding upper bound vs network-coding
//! lower bound for the asymmetric-erasure scenarios, swept over the
//! relay count.
//!
//! Run with: cargo run --release --example bound_curves

use mmwave_rlnc::bounds::{eff_forwarding_ub, eff_nc_lb, DownlinkScenario};

fn table(label: &str, build: impl Fn(usize) -> Vec<f64>) {
    println!("{label}");
    println!(
        "{:>3} {:>12} {:>12} {:>8}",
        "N", "fwd upper", "nc lower", "gap"
    );
    for n in 1..=10 {
        let scenario = DownlinkScenario::new(1, build(n)).unwrap();
        let ub = eff_forwarding_ub(&scenario).unwrap();
        let lb = eff_nc_lb(&scenario);
        println!("{n:>3} {ub:>12.6} {lb:>12.6} {:>8.4}", lb - ub);
    }
    println!();
}

fn main() {
    for &(low, high) in &[(0.1, 0.6), (0.1, 0.9)] {
        table(&format!("one good link (p={low}), rest at p={high}"), |n| {
            let mut p = vec![high; n];
            p[0] = low;
            p
        });
        table(&format!("one bad link (p={high}), rest at p={low}"), |n| {
            let mut p = vec![low; n];
            p[0] = high;
            p
        });
    }
    println!("symmetric links: both bounds coincide at 1-p, so the curves touch.");
}
