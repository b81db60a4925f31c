//! Modeled cost of the three strategies as the user population grows.
//!
//! `cargo run --example flop_model`

use ifbc::flops::{flops_brute_force, flops_o_algorithm, flops_s_algorithm, FlopParams};
use ifbc::system::SystemConfig;

fn main() {
    let p = FlopParams::from_config(&SystemConfig::large());
    println!(
        "{:>4} {:>14} {:>14} {:>10} {:>12}",
        "K_T", "o", "s", "o/s", "brute"
    );
    for k_t in (10..=60).step_by(10) {
        let q = p.with_users(k_t);
        let (o, s) = (flops_o_algorithm(&q), flops_s_algorithm(&q));
        println!(
            "{k_t:>4} {o:>14} {s:>14} {:>10.4} {:>12.3e}",
            o.to_f64() / s.to_f64(),
            flops_brute_force(&q).to_f64()
        );
    }
}
