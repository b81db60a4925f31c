use std::path::PathBuf;

use thiserror::Error;

use crate::system::Violation;

/// Errors produced anywhere in the alignment, selection and benchmark pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("column {column} is numerically dependent on the preceding columns")]
    RankDeficient { column: usize },

    #[error("null space too small: needed {needed} dimensions, found {found}")]
    NullSpaceTooSmall { needed: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive definite (eigenvalue ratio {ratio:e})")]
    NotPositiveDefinite { ratio: f64 },

    #[error("water-filling called with no gains")]
    EmptyGains,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {}", format_violations(.0))]
    InvalidConfig(Vec<Violation>),

    #[error("receive beamformer for user {user} is rank deficient")]
    DegenerateBeamformer { user: usize },

    #[error("desired link of user {user} in cell {cell} lost rank")]
    RankDeficientDesiredLink { cell: usize, user: usize },

    #[error("brute-force search over {count} subset tuples exceeds the cap of {cap}")]
    SearchSpaceTooLarge { count: String, cap: u128 },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
