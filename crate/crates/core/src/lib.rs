//! Interference alignment for multi-cell MIMO downlink with user selection.
//!
//! The crate builds the extended-grouping alignment of an L-cell interfering
//! broadcast channel, rates it with per-cell water-filling, and compares three
//! ways of choosing which K of the K_T users in each cell to serve:
//! exhaustive search, sum-rate coordinate ascent and orthogonality-guided
//! coordinate ascent. A closed-form flop model and a seeded Monte Carlo
//! harness round it out.
//!
//! ```no_run
//! use ifbc::prelude::*;
//!
//! let cfg = SystemConfig::small().with_users(8).with_snr_db(10.0);
//! let channels = generate_channels(&cfg, 42).unwrap();
//! let best = brute_force_select(&cfg, &channels, DEFAULT_BRUTE_CAP).unwrap();
//! let fast = o_algorithm(&cfg, &channels).unwrap();
//! println!("{} vs {}", best.selection.achieved_rate, fast.selection.achieved_rate);
//! ```

pub mod align;
pub mod bench;
pub mod error;
pub mod flops;
pub mod linalg;
pub mod select;
pub mod system;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::align::{AlignedSystem, AlignmentState, PrecoderSet, RateReport};
    pub use crate::bench::{run_experiment, Algorithm, ExperimentSpec};
    pub use crate::error::{Error, Result};
    pub use crate::linalg::{
        chordal_distance, gso, null_space, water_fill, ComplexMatrix, SubspaceBasis,
    };
    pub use crate::select::{
        brute_force_select, init_subsets, o_algorithm, s_algorithm, SearchResult, Selection,
        DEFAULT_BRUTE_CAP,
    };
    pub use crate::system::{generate_channels, ChannelSet, SystemConfig};
}
