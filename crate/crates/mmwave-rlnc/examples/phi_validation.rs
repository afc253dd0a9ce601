//! Empirical singularity probability of random coefficient matrices
//! against its analytic upper bound, across code lengths and field
//! sizes.
//!
//! Run with: cargo run --release --example phi_validation

use mmwave_rlnc::campaign::run_phi_validation;
use mmwave_rlnc::config::ExperimentConfig;

fn main() {
    let mut config = ExperimentConfig::default();
    config.output_dir = "results/example_phi".into();
    let summary = run_phi_validation(&config).unwrap();

    println!(
        "{:>3} {:>6} {:>5} {:>10} {:>10} {:>10} {:>9}",
        "z", "q", "p", "phi_hat", "3*stderr", "phi_ub", "feasible"
    );
    for row in &summary.rows {
        println!(
            "{:>3} {:>6} {:>5.1} {:>10.5} {:>10.5} {:>10.5} {:>9}",
            row.code_length,
            row.field_size,
            row.erasure,
            row.phi_hat,
            3.0 * row.std_error,
            row.phi_ub,
            row.feasible
        );
    }
    for file in &summary.files {
        println!("wrote {}", file.display());
    }
}
