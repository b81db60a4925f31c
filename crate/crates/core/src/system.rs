//! System configuration, antenna feasibility and seeded channel draws.
//!
//! Cells and users are indexed from zero. Cell `l` interferes with every
//! other cell; its cyclic successor `next(l)` is the cell whose users are
//! grouped against BS `l`.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Parameters of the L-cell downlink.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// L
    pub num_cells: usize,
    /// K_T, identical in every cell.
    pub users_per_cell: usize,
    /// K, users served per cell.
    pub select_per_cell: usize,
    /// M
    pub tx_antennas: usize,
    /// N
    pub rx_antennas: usize,
    /// d_s
    pub streams_per_user: usize,
    /// Per-BS power budget P.
    pub bs_power: f64,
    /// Noise variance σ².
    pub noise_var: f64,
}

/// One violated feasibility constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    ZeroDimension,
    NonPositivePower,
    NonPositiveNoise,
    TooFewCells,
    SelectExceedsUsers,
    StreamsExceedRx,
    RxNotBelowTx,
    TransmitAntennas,
    ReceiveAntennas,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Violation::ZeroDimension => "all counts must be positive",
            Violation::NonPositivePower => "bs_power must be positive",
            Violation::NonPositiveNoise => "noise_var must be positive",
            Violation::TooFewCells => "L >= 2",
            Violation::SelectExceedsUsers => "K <= K_T",
            Violation::StreamsExceedRx => "d_s <= N",
            Violation::RxNotBelowTx => "N < M",
            Violation::TransmitAntennas => "M >= [K(L-1)+1] d_s",
            Violation::ReceiveAntennas => "K N >= (K-1) M + d_s",
        };
        f.write_str(s)
    }
}

impl SystemConfig {
    /// Every violated constraint; empty when the configuration is feasible.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let (l, kt, k) = (self.num_cells, self.users_per_cell, self.select_per_cell);
        let (m, n, ds) = (self.tx_antennas, self.rx_antennas, self.streams_per_user);
        if [l, kt, k, m, n, ds].contains(&0) {
            out.push(Violation::ZeroDimension);
        }
        if !(self.bs_power > 0.0 && self.bs_power.is_finite()) {
            out.push(Violation::NonPositivePower);
        }
        if !(self.noise_var > 0.0 && self.noise_var.is_finite()) {
            out.push(Violation::NonPositiveNoise);
        }
        if l < 2 {
            out.push(Violation::TooFewCells);
        }
        if k > kt {
            out.push(Violation::SelectExceedsUsers);
        }
        if ds > n {
            out.push(Violation::StreamsExceedRx);
        }
        if n >= m {
            out.push(Violation::RxNotBelowTx);
        }
        if m < (k * l.saturating_sub(1) + 1) * ds {
            out.push(Violation::TransmitAntennas);
        }
        if k * n < k.saturating_sub(1) * m + ds {
            out.push(Violation::ReceiveAntennas);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }

    /// Cyclic successor of cell `l`.
    pub fn next_cell(&self, l: usize) -> usize {
        (l + 1) % self.num_cells
    }

    /// Cyclic predecessor of cell `l`.
    pub fn prev_cell(&self, l: usize) -> usize {
        (l + self.num_cells - 1) % self.num_cells
    }

    /// The same system at the given SNR = P/σ² in dB, keeping P.
    pub fn with_snr_db(&self, snr_db: f64) -> Self {
        Self {
            noise_var: self.bs_power / 10f64.powf(snr_db / 10.0),
            ..self.clone()
        }
    }

    pub fn with_users(&self, users_per_cell: usize) -> Self {
        Self {
            users_per_cell,
            ..self.clone()
        }
    }

    /// M=3, N=2, K=2, L=2, d_s=1 with unit power and noise.
    pub fn small() -> Self {
        Self {
            num_cells: 2,
            users_per_cell: 2,
            select_per_cell: 2,
            tx_antennas: 3,
            rx_antennas: 2,
            streams_per_user: 1,
            bs_power: 1.0,
            noise_var: 1.0,
        }
    }

    /// M=6, N=4, K=2, L=2, d_s=2 with unit power and noise.
    pub fn large() -> Self {
        Self {
            tx_antennas: 6,
            rx_antennas: 4,
            streams_per_user: 2,
            ..Self::small()
        }
    }
}

/// Downlink channels `H[l][k][j]` (N×M) from BS `j` to user `k` of cell `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    num_cells: usize,
    users_per_cell: usize,
    matrices: Vec<ComplexMatrix>,
    seed: u64,
}

impl ChannelSet {
    fn slot(&self, cell: usize, user: usize, bs: usize) -> usize {
        assert!(cell < self.num_cells && bs < self.num_cells && user < self.users_per_cell);
        (cell * self.users_per_cell + user) * self.num_cells + bs
    }

    /// Channel from BS `bs` to user `user` of cell `cell`.
    pub fn get(&self, cell: usize, user: usize, bs: usize) -> &ComplexMatrix {
        &self.matrices[self.slot(cell, user, bs)]
    }

    pub fn get_mut(&mut self, cell: usize, user: usize, bs: usize) -> &mut ComplexMatrix {
        let i = self.slot(cell, user, bs);
        &mut self.matrices[i]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn users_per_cell(&self) -> usize {
        self.users_per_cell
    }

    pub fn iter(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.matrices.iter()
    }
}

/// Draws every channel entry as unit-variance circular complex Gaussian.
///
/// The generator is ChaCha8 seeded with `seed`; entries are drawn cell by
/// cell, user by user, BS by BS, in row-major order, real part first.
pub fn generate_channels(cfg: &SystemConfig, seed: u64) -> Result<ChannelSet> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let (n, m) = (cfg.rx_antennas, cfg.tx_antennas);
    let count = cfg.num_cells * cfg.users_per_cell * cfg.num_cells;
    let matrices = (0..count)
        .map(|_| {
            let entries: Vec<Complex64> = (0..n * m)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re * scale, im * scale)
                })
                .collect();
            ComplexMatrix::from_row_slice(n, m, &entries)
        })
        .collect();
    Ok(ChannelSet {
        num_cells: cfg.num_cells,
        users_per_cell: cfg.users_per_cell,
        matrices,
        seed,
    })
}

/// Channel of the reciprocal (uplink) system: the conjugate transpose.
pub fn reciprocal_channel(h: &ComplexMatrix) -> ComplexMatrix {
    h.adjoint()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one Monte Carlo trial, mixed from the master seed with SplitMix64.
pub fn trial_seed(master_seed: u64, users_per_cell: usize, trial: usize) -> u64 {
    let a = splitmix64(master_seed);
    let b = splitmix64(a ^ users_per_cell as u64);
    splitmix64(b ^ (trial as u64).rotate_left(32))
}
