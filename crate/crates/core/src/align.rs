//! Interference alignment by extended grouping.
//!
//! BS `l` sees the selected users of cell `next(l)` through a single
//! `d_s`-dimensional intersection subspace `G_l`. Solving one joint null-space
//! problem yields `G_l` together with the receive beamformers of those users;
//! each precoder then lies in the null space of `G_l`, the effective ICI
//! channels of the remaining cells and the effective IUI channels of its own
//! cell.

use crate::error::{Error, Result};
use crate::linalg::{
    frobenius, gso, inv_sqrt_hermitian, null_space, singular_values, water_fill, ComplexMatrix,
    SubspaceBasis, RANK_TOL,
};
use crate::system::{ChannelSet, SystemConfig};

/// Relative singular-value floor for a receive beamformer to count as full rank.
pub const BEAMFORMER_RANK_TOL: f64 = 1e-8;

/// Relative singular-value floor for a desired effective channel.
pub const DESIRED_LINK_RANK_TOL: f64 = 1e-6;

/// Interference leakage above which a trial's rates are not trusted.
pub const RESIDUAL_GATE: f64 = 1e-6;

/// Intersection subspace at one BS and the receivers of the grouped users.
#[derive(Debug, Clone)]
pub struct GroupingResult {
    /// The BS whose interference is aligned.
    pub bs: usize,
    /// Orthonormal basis of `G_l`, M×d_s.
    pub intersection: SubspaceBasis,
    /// Grouped users of cell `next(bs)`, in the order they were stacked.
    pub users: Vec<usize>,
    /// N×d_s receive beamformer per grouped user.
    pub receivers: Vec<ComplexMatrix>,
}

impl GroupingResult {
    pub fn receiver(&self, user: usize) -> Option<&ComplexMatrix> {
        self.users
            .iter()
            .position(|&u| u == user)
            .map(|i| &self.receivers[i])
    }
}

/// The stacked KM × (M+KN) system `[I_M, …, −H_kᴴ, …]` whose null space
/// holds `[G; U_1; …; U_K]`.
pub fn grouping_matrix(
    cfg: &SystemConfig,
    channels: &ChannelSet,
    bs: usize,
    users: &[usize],
) -> ComplexMatrix {
    let (m, n, k) = (cfg.tx_antennas, cfg.rx_antennas, users.len());
    let cell = cfg.next_cell(bs);
    let mut f = ComplexMatrix::zeros(k * m, m + k * n);
    for (i, &user) in users.iter().enumerate() {
        f.view_mut((i * m, 0), (m, m)).fill_with_identity();
        let h = channels.get(cell, user, bs).adjoint();
        f.view_mut((i * m, m + i * n), (m, n)).copy_from(&(-h));
    }
    f
}

/// Solves the joint grouping problem at BS `bs` for users of cell `next(bs)`.
pub fn group_cell(
    cfg: &SystemConfig,
    channels: &ChannelSet,
    bs: usize,
    users: &[usize],
) -> Result<GroupingResult> {
    if users.is_empty() {
        return Err(Error::InvalidInput(
            "grouping needs at least one user".into(),
        ));
    }
    let (m, n, ds) = (cfg.tx_antennas, cfg.rx_antennas, cfg.streams_per_user);
    let f = grouping_matrix(cfg, channels, bs, users);
    let x = null_space(&f, ds, RANK_TOL)?.into_generator();

    let intersection = gso(&x.rows(0, m).into_owned())
        .map_err(|_| Error::DegenerateBeamformer { user: users[0] })?;
    let mut receivers = Vec::with_capacity(users.len());
    for (i, &user) in users.iter().enumerate() {
        let u = x.rows(m + i * n, n).into_owned();
        let sv = singular_values(&u);
        let max = sv.first().copied().unwrap_or(0.0);
        let min = sv.last().copied().unwrap_or(0.0);
        if !(max > 0.0) || min <= BEAMFORMER_RANK_TOL * max {
            return Err(Error::DegenerateBeamformer { user });
        }
        receivers.push(u);
    }
    Ok(GroupingResult {
        bs,
        intersection,
        users: users.to_vec(),
        receivers,
    })
}

/// Groupings at every BS; entry `l` aligns the interference of BS `l`.
#[derive(Debug, Clone)]
pub struct AlignmentState {
    pub groupings: Vec<GroupingResult>,
}

impl AlignmentState {
    /// Runs the grouping at every BS for the given per-cell subsets.
    pub fn solve(
        cfg: &SystemConfig,
        channels: &ChannelSet,
        subsets: &[Vec<usize>],
    ) -> Result<Self> {
        let groupings = (0..cfg.num_cells)
            .map(|bs| group_cell(cfg, channels, bs, &subsets[cfg.next_cell(bs)]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { groupings })
    }

    /// Receive beamformer of `user` in `cell`.
    pub fn receiver(&self, cfg: &SystemConfig, cell: usize, user: usize) -> &ComplexMatrix {
        self.groupings[cfg.prev_cell(cell)]
            .receiver(user)
            .unwrap_or_else(|| panic!("user {user} of cell {cell} is not grouped"))
    }

    /// `G_l` for BS `bs`.
    pub fn intersection(&self, bs: usize) -> &SubspaceBasis {
        &self.groupings[bs].intersection
    }
}

/// Rows whose null space contains the precoder of `user` in `cell`:
/// `G_lᴴ`, the effective ICI channels `U_tᴴ H_t^[s,l]` for cells other than
/// `l` and `next(l)`, and the effective IUI channels of the other own-cell users.
pub fn precoder_constraints(
    cfg: &SystemConfig,
    channels: &ChannelSet,
    subsets: &[Vec<usize>],
    state: &AlignmentState,
    cell: usize,
    user: usize,
) -> ComplexMatrix {
    let mut blocks: Vec<ComplexMatrix> = vec![state.intersection(cell).generator().adjoint()];
    for s in 0..cfg.num_cells {
        if s == cell || s == cfg.next_cell(cell) {
            continue;
        }
        for &t in &subsets[s] {
            blocks.push(state.receiver(cfg, s, t).adjoint() * channels.get(s, t, cell));
        }
    }
    for &t in subsets[cell].iter().filter(|&&t| t != user) {
        blocks.push(state.receiver(cfg, cell, t).adjoint() * channels.get(cell, t, cell));
    }
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = ComplexMatrix::zeros(rows, cfg.tx_antennas);
    let mut r = 0;
    for b in &blocks {
        out.view_mut((r, 0), b.shape()).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Orthonormal M×d_s precoder for `user` in `cell`.
pub fn design_precoder(
    cfg: &SystemConfig,
    channels: &ChannelSet,
    subsets: &[Vec<usize>],
    state: &AlignmentState,
    cell: usize,
    user: usize,
) -> Result<ComplexMatrix> {
    let a = precoder_constraints(cfg, channels, subsets, state, cell, user);
    Ok(null_space(&a, cfg.streams_per_user, RANK_TOL)?.into_generator())
}

/// Precoders for every selected user, indexed like the subsets.
#[derive(Debug, Clone)]
pub struct PrecoderSet {
    pub per_cell: Vec<Vec<ComplexMatrix>>,
}

impl PrecoderSet {
    pub fn design(
        cfg: &SystemConfig,
        channels: &ChannelSet,
        subsets: &[Vec<usize>],
        state: &AlignmentState,
    ) -> Result<Self> {
        let per_cell = subsets
            .iter()
            .enumerate()
            .map(|(l, users)| {
                users
                    .iter()
                    .map(|&k| design_precoder(cfg, channels, subsets, state, l, k))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { per_cell })
    }
}

/// Largest normalized leakage `‖U_kᴴ H V_i‖_F / ‖H‖_F` over every IUI and
/// ICI pair; fails if a desired effective channel has lost rank.
pub fn interference_residual(
    cfg: &SystemConfig,
    channels: &ChannelSet,
    subsets: &[Vec<usize>],
    state: &AlignmentState,
    precoders: &PrecoderSet,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (l, users) in subsets.iter().enumerate() {
        for &k in users {
            let u_h = state.receiver(cfg, l, k).adjoint();
            for (j, others) in subsets.iter().enumerate() {
                let h = channels.get(l, k, j);
                let hn = frobenius(h);
                for (slot, &i) in others.iter().enumerate() {
                    let v = &precoders.per_cell[j][slot];
                    let product = &u_h * h * v;
                    if j == l && i == k {
                        let sv = singular_values(&product);
                        let max = sv.first().copied().unwrap_or(0.0);
                        let min = sv.last().copied().unwrap_or(0.0);
                        if !(max > 0.0) || min <= DESIRED_LINK_RANK_TOL * max {
                            return Err(Error::RankDeficientDesiredLink { cell: l, user: k });
                        }
                    } else if hn > 0.0 {
                        worst = worst.max(frobenius(&product) / hn);
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Effective channel of one user after combining and pre-whitening.
#[derive(Debug, Clone)]
pub struct EffectiveLink {
    /// `Uᴴ H V`
    pub h_bar: ComplexMatrix,
    /// `(UᴴU)^{-1/2}`
    pub whitener: ComplexMatrix,
    /// Singular values of `W H̄`, descending.
    pub singular_values: Vec<f64>,
}

pub fn effective_link(
    h: &ComplexMatrix,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
) -> Result<EffectiveLink> {
    if h.nrows() != u.nrows() || h.ncols() != v.nrows() || u.ncols() != v.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "H {:?}, U {:?}, V {:?}",
            h.shape(),
            u.shape(),
            v.shape()
        )));
    }
    let h_bar = u.adjoint() * h * v;
    let whitener = inv_sqrt_hermitian(&(u.adjoint() * u))?;
    let singular_values = singular_values(&(&whitener * &h_bar));
    Ok(EffectiveLink {
        h_bar,
        whitener,
        singular_values,
    })
}

/// Rates of one cell under joint water-filling over all its streams.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRate {
    pub per_user: Vec<f64>,
    pub total: f64,
}

/// Water-fills the BS budget over every stream of the cell and splits the
/// resulting rate back to the users that own each stream.
pub fn cell_sum_rate(links: &[EffectiveLink], power: f64, noise_var: f64) -> Result<CellRate> {
    if links.is_empty() {
        return Err(Error::EmptyGains);
    }
    let mut owners = Vec::new();
    let mut gains = Vec::new();
    for (i, link) in links.iter().enumerate() {
        for s in &link.singular_values {
            let g = s * s / noise_var;
            if g > 0.0 {
                owners.push(i);
                gains.push(g);
            }
        }
    }
    let mut per_user = vec![0.0; links.len()];
    if !gains.is_empty() {
        let alloc = water_fill(&gains, power)?;
        for ((&owner, g), p) in owners.iter().zip(&gains).zip(&alloc.powers) {
            per_user[owner] += (1.0 + p * g).log2();
        }
    }
    let total = per_user.iter().sum();
    Ok(CellRate { per_user, total })
}

/// Achieved sum rate, broken down per user and per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// Indexed like the subsets.
    pub per_user: Vec<Vec<f64>>,
    pub per_cell: Vec<f64>,
    pub total: f64,
}

pub fn system_sum_rate(
    cfg: &SystemConfig,
    channels: &ChannelSet,
    subsets: &[Vec<usize>],
    state: &AlignmentState,
    precoders: &PrecoderSet,
) -> Result<RateReport> {
    let mut per_user = Vec::with_capacity(subsets.len());
    let mut per_cell = Vec::with_capacity(subsets.len());
    for (l, users) in subsets.iter().enumerate() {
        let links = users
            .iter()
            .zip(&precoders.per_cell[l])
            .map(|(&k, v)| effective_link(channels.get(l, k, l), state.receiver(cfg, l, k), v))
            .collect::<Result<Vec<_>>>()?;
        let rate = cell_sum_rate(&links, cfg.bs_power, cfg.noise_var)?;
        per_cell.push(rate.total);
        per_user.push(rate.per_user);
    }
    let total = per_cell.iter().sum();
    Ok(RateReport {
        per_user,
        per_cell,
        total,
    })
}

/// A fully aligned system for one choice of per-cell subsets.
#[derive(Debug, Clone)]
pub struct AlignedSystem {
    /// Each cell's users in ascending id order.
    pub subsets: Vec<Vec<usize>>,
    pub state: AlignmentState,
    pub precoders: PrecoderSet,
    pub rate: RateReport,
}

impl AlignedSystem {
    /// Aligns and rates the system. Subsets are put in ascending id order
    /// first, so the result depends only on which users are selected.
    pub fn build(
        cfg: &SystemConfig,
        channels: &ChannelSet,
        subsets: &[Vec<usize>],
    ) -> Result<Self> {
        let subsets = canonical(subsets);
        let state = AlignmentState::solve(cfg, channels, &subsets)?;
        Self::from_state(cfg, channels, subsets, state)
    }

    /// Like [`AlignedSystem::build`] with groupings already solved for the
    /// canonical subsets.
    pub fn from_state(
        cfg: &SystemConfig,
        channels: &ChannelSet,
        subsets: Vec<Vec<usize>>,
        state: AlignmentState,
    ) -> Result<Self> {
        let precoders = PrecoderSet::design(cfg, channels, &subsets, &state)?;
        let rate = system_sum_rate(cfg, channels, &subsets, &state, &precoders)?;
        Ok(Self {
            subsets,
            state,
            precoders,
            rate,
        })
    }

    pub fn residual(&self, cfg: &SystemConfig, channels: &ChannelSet) -> Result<f64> {
        interference_residual(cfg, channels, &self.subsets, &self.state, &self.precoders)
    }
}

/// Each subset sorted by user id.
pub fn canonical(subsets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    subsets
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s
        })
        .collect()
}
