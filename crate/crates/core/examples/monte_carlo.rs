//! A small seeded sweep, written as CSV.
//!
//! `cargo run --release --example monte_carlo -- [out_dir]`

use ifbc::bench::{emit_results, run_experiment, ExperimentSpec};
use ifbc::system::SystemConfig;

fn main() -> ifbc::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "target/monte_carlo".into());
    let spec = ExperimentSpec {
        users_sweep: vec![4, 6, 8],
        snr_db_list: vec![10.0, 20.0],
        num_trials: 50,
        ..ExperimentSpec::new(SystemConfig::small())
    };
    let result = run_experiment(&spec)?;
    for row in &result.aggregates {
        println!(
            "K_T={:>2} {:>4} dB {:>5}: {:.3} ± {:.3} (n={}, flops {})",
            row.k_t, row.snr_db, row.algorithm, row.mean_rate, row.stderr, row.n, row.flops_model
        );
    }
    let files = emit_results(&spec, &result, out.as_ref())?;
    println!("wrote {}", files.aggregates.display());
    Ok(())
}
