//! Power allocation over parallel channels.
//!
//! `cargo run --example water_filling`

use ifbc::linalg::water_fill;

fn main() -> ifbc::Result<()> {
    let gains = [4.0, 1.0, 0.25, 0.05];
    for budget in [0.5, 2.0, 20.0] {
        let alloc = water_fill(&gains, budget)?;
        println!(
            "P = {budget:>4}: level {:.3}, powers {:.3?}, rate {:.3} bits",
            alloc.water_level,
            alloc.powers,
            alloc.rate_bits(&gains)
        );
    }
    Ok(())
}
