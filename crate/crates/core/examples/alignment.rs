//! Align a two-cell system and inspect what the receivers see.
//!
//! `cargo run --example alignment`

use ifbc::prelude::*;

fn main() -> Result<()> {
    let cfg = SystemConfig::large().with_users(4).with_snr_db(20.0);
    let channels = generate_channels(&cfg, 7)?;
    let sys = AlignedSystem::build(&cfg, &channels, &[vec![0, 3], vec![1, 2]])?;

    for g in &sys.state.groupings {
        println!(
            "BS {} aligns cell {} users {:?} onto a {}-dim subspace",
            g.bs,
            cfg.next_cell(g.bs),
            g.users,
            g.intersection.dim()
        );
    }
    println!(
        "worst leakage |U^H H V| / |H| = {:.2e}",
        sys.residual(&cfg, &channels)?
    );
    for (l, rates) in sys.rate.per_user.iter().enumerate() {
        println!(
            "cell {l}: users {:?} rates {rates:.3?} bits/s/Hz",
            sys.subsets[l]
        );
    }
    println!("sum rate {:.3} bits/s/Hz", sys.rate.total);
    Ok(())
}
