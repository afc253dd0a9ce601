//! Uplink backhaul efficiency: the network-coding lower bound and the
//! forwarding approximation next to simulated values, over the erasure
//! grid. Cells past the feasibility frontier print as undefined.
//!
//! Run with: cargo run --release --example backhaul_bounds

use mmwave_rlnc::bounds::{bkeff_forwarding_symmetric, bkeff_nc_lb, SeriesControl, UplinkScenario};
use mmwave_rlnc::campaign::simulate_symmetric_uplink;
use mmwave_rlnc::config::rng_for;
use mmwave_rlnc::gf::FieldContext;

fn main() {
    let field = FieldContext::new(1024).unwrap();
    for &z in &[4usize, 12] {
        let relays = z;
        println!("z = {z} devices, N = {relays} relays, q = 1024");
        println!(
            "{:>5} {:>10} {:>12} {:>10} {:>10} {:>10}",
            "p", "nc bound", "nc sim", "fwd approx", "fwd sim", "phi_ub"
        );
        for i in 1..=9 {
            let p = 0.1 * i as f64;
            let scenario = UplinkScenario::symmetric(z, relays, p).unwrap();
            let bound = bkeff_nc_lb(&scenario, 1024, SeriesControl::default()).unwrap();
            let mut rng = rng_for(11, &[z as u64, p.to_bits()]);
            let ((nc_sim, _), (fwd_sim, _)) =
                simulate_symmetric_uplink(&field, z, relays, p, 2_000, &mut rng);
            let phi = mmwave_rlnc::bounds::phi_ub(z as u64, 1024, p);
            let bound_cell = match bound.efficiency() {
                Some(v) => format!("{v:>10.4}"),
                None => format!("{:>10}", "undefined"),
            };
            println!(
                "{p:>5.1} {bound_cell} {nc_sim:>12.4} {:>10.4} {fwd_sim:>10.4} {phi:>10.4}",
                bkeff_forwarding_symmetric(relays, p).unwrap()
            );
        }
        println!();
    }
}
