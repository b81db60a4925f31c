//! Exhaustive search against the two coordinate-ascent heuristics on one draw.
//!
//! `cargo run --release --example selection -- [K_T] [seed]`

use ifbc::prelude::*;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let k_t = args.next().and_then(|a| a.parse().ok()).unwrap_or(8);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let cfg = SystemConfig::small().with_users(k_t).with_snr_db(10.0);
    let channels = generate_channels(&cfg, seed)?;

    let runs = [
        (
            "brute",
            brute_force_select(&cfg, &channels, DEFAULT_BRUTE_CAP)?,
        ),
        ("s", s_algorithm(&cfg, &channels)?),
        ("o", o_algorithm(&cfg, &channels)?),
    ];
    println!(
        "K_T = {k_t}, seed = {seed}, start {:.3}",
        runs[1].1.trace.initial_rate
    );
    for (name, out) in &runs {
        println!(
            "{name:>5}: {:.3} bits/s/Hz with {:?} after {} rate evaluations, {} swaps",
            out.selection.achieved_rate,
            out.selection.subsets,
            out.trace.rate_evaluations,
            out.trace.accepted_steps.len()
        );
    }
    Ok(())
}
