//! User selection: exhaustive search and two coordinate-ascent heuristics.
//!
//! Both heuristics start from the K strongest users of each cell and visit
//! every (cell, slot) pair once, cell by cell. For a slot, every user not held
//! by another slot of the same cell is a candidate, including the incumbent.
//! The sum-rate search rates every candidate; the orthogonality search ranks
//! candidates by how far their desired signal space at the BS sits from the
//! interference space, in the reciprocal system, and rates only the winner.
//! A swap is kept only if it strictly raises the sum rate.

use crate::align::{canonical, group_cell, AlignedSystem, AlignmentState, GroupingResult};
use crate::error::{Error, Result};
use crate::flops::brute_force_combinations;
use crate::linalg::{frobenius, gso, projector_gap, ComplexMatrix};
use crate::system::{ChannelSet, SystemConfig};

/// Default cap on the number of subset tuples exhaustive search may visit.
pub const DEFAULT_BRUTE_CAP: u128 = 10_000_000;

/// Per-cell selected users and the sum rate they achieve.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// One list of K distinct user ids per cell, in slot order.
    pub subsets: Vec<Vec<usize>>,
    pub achieved_rate: f64,
}

impl Selection {
    /// Checks that each cell holds exactly K distinct ids below K_T.
    pub fn is_valid(&self, cfg: &SystemConfig) -> bool {
        self.subsets.len() == cfg.num_cells
            && self.subsets.iter().all(|s| {
                let mut sorted = s.clone();
                sorted.sort_unstable();
                sorted.dedup();
                s.len() == cfg.select_per_cell
                    && sorted.len() == s.len()
                    && s.iter().all(|&u| u < cfg.users_per_cell)
            })
    }
}

/// One accepted swap.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptedStep {
    pub cell: usize,
    pub slot: usize,
    pub old_user: usize,
    pub new_user: usize,
    pub rate_before: f64,
    pub rate_after: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SelectionTrace {
    pub initial_rate: f64,
    pub accepted_steps: Vec<AcceptedStep>,
    /// Candidates scanned.
    pub candidate_evaluations: usize,
    /// Full alignment-and-rate evaluations attempted.
    pub rate_evaluations: usize,
    /// Candidates dropped because their alignment failed.
    pub skipped_candidates: usize,
}

/// Outcome of a selection run, with the aligned system for the final choice.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub selection: Selection,
    pub trace: SelectionTrace,
    pub system: AlignedSystem,
}

/// The K users with the largest direct-channel Frobenius norm in each cell,
/// strongest first; ties go to the lower id.
pub fn strongest_users(cfg: &SystemConfig, channels: &ChannelSet) -> Vec<Vec<usize>> {
    (0..cfg.num_cells)
        .map(|l| {
            let mut ranked: Vec<(usize, f64)> = (0..cfg.users_per_cell)
                .map(|j| (j, frobenius(channels.get(l, j, l))))
                .collect();
            ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            ranked
                .into_iter()
                .take(cfg.select_per_cell)
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

/// Initial selection shared by both heuristics, aligned and rated.
pub fn init_subsets(
    cfg: &SystemConfig,
    channels: &ChannelSet,
) -> Result<(Selection, AlignedSystem)> {
    cfg.validate()?;
    let subsets = strongest_users(cfg, channels);
    let system = AlignedSystem::build(cfg, channels, &subsets)?;
    let selection = Selection {
        subsets,
        achieved_rate: system.rate.total,
    };
    Ok((selection, system))
}

fn candidates(cfg: &SystemConfig, subset: &[usize], slot: usize) -> Vec<usize> {
    (0..cfg.users_per_cell)
        .filter(|j| !subset.iter().enumerate().any(|(i, u)| i != slot && u == j))
        .collect()
}

/// Regroups cell `cell` with `temp` as its users and rates the whole system.
fn rate_with_cell(
    cfg: &SystemConfig,
    channels: &ChannelSet,
    current: &AlignedSystem,
    temp: &[Vec<usize>],
    cell: usize,
    grouping: GroupingResult,
) -> Result<AlignedSystem> {
    let mut state = current.state.clone();
    state.groupings[cfg.prev_cell(cell)] = grouping;
    AlignedSystem::from_state(cfg, channels, canonical(temp), state)
}

fn regroup(
    cfg: &SystemConfig,
    channels: &ChannelSet,
    cell: usize,
    users: &[usize],
) -> Result<GroupingResult> {
    let mut sorted = users.to_vec();
    sorted.sort_unstable();
    group_cell(cfg, channels, cfg.prev_cell(cell), &sorted)
}

struct Ascent {
    subsets: Vec<Vec<usize>>,
    system: AlignedSystem,
    best: f64,
    trace: SelectionTrace,
}

impl Ascent {
    fn start(cfg: &SystemConfig, channels: &ChannelSet) -> Result<Self> {
        let (init, system) = init_subsets(cfg, channels)?;
        let trace = SelectionTrace {
            initial_rate: init.achieved_rate,
            ..Default::default()
        };
        Ok(Self {
            subsets: init.subsets,
            best: init.achieved_rate,
            system,
            trace,
        })
    }

    fn offer(&mut self, cell: usize, slot: usize, user: usize, system: AlignedSystem) {
        let rate = system.rate.total;
        if rate > self.best {
            self.trace.accepted_steps.push(AcceptedStep {
                cell,
                slot,
                old_user: self.subsets[cell][slot],
                new_user: user,
                rate_before: self.best,
                rate_after: rate,
            });
            self.subsets[cell][slot] = user;
            self.best = rate;
            self.system = system;
        }
    }

    fn finish(self) -> SearchResult {
        SearchResult {
            selection: Selection {
                subsets: self.subsets,
                achieved_rate: self.best,
            },
            trace: self.trace,
            system: self.system,
        }
    }
}

/// Sum-rate-based coordinate ascent.
pub fn s_algorithm(cfg: &SystemConfig, channels: &ChannelSet) -> Result<SearchResult> {
    let mut run = Ascent::start(cfg, channels)?;
    for l in 0..cfg.num_cells {
        for k in 0..cfg.select_per_cell {
            let mut winner: Option<(usize, AlignedSystem)> = None;
            for j in candidates(cfg, &run.subsets[l], k) {
                run.trace.candidate_evaluations += 1;
                let mut temp = run.subsets.clone();
                temp[l][k] = j;
                run.trace.rate_evaluations += 1;
                let evaluated = regroup(cfg, channels, l, &temp[l])
                    .and_then(|g| rate_with_cell(cfg, channels, &run.system, &temp, l, g));
                match evaluated {
                    Ok(sys) => {
                        if winner
                            .as_ref()
                            .is_none_or(|(_, w)| sys.rate.total > w.rate.total)
                        {
                            winner = Some((j, sys));
                        }
                    }
                    Err(_) => run.trace.skipped_candidates += 1,
                }
            }
            if let Some((j, sys)) = winner {
                run.offer(l, k, j, sys);
            }
        }
    }
    Ok(run.finish())
}

/// `‖A Aᴴ − B Bᴴ‖_F` after orthonormalizing both generators.
pub fn orthogonality_metric(desired: &ComplexMatrix, interference: &ComplexMatrix) -> Result<f64> {
    projector_gap(&gso(desired)?, &gso(interference)?)
}

/// Desired-signal and interference generators of candidate `user` at BS `cell`
/// in the reciprocal system, given the candidate grouping of `cell`'s users.
pub fn reciprocal_spaces(
    cfg: &SystemConfig,
    channels: &ChannelSet,
    subsets: &[Vec<usize>],
    state: &AlignmentState,
    cell: usize,
    user: usize,
    candidate_grouping: &GroupingResult,
) -> (ComplexMatrix, ComplexMatrix) {
    let receiver = |t: usize| {
        candidate_grouping
            .receiver(t)
            .expect("candidate is grouped")
    };
    let desired = channels.get(cell, user, cell).adjoint() * receiver(user);

    let mut blocks = vec![state.intersection(cell).generator().clone()];
    for &t in subsets[cell].iter().filter(|&&t| t != user) {
        blocks.push(channels.get(cell, t, cell).adjoint() * receiver(t));
    }
    for m in 0..cfg.num_cells {
        if m == cell || m == cfg.next_cell(cell) {
            continue;
        }
        for &t in &subsets[m] {
            blocks.push(channels.get(m, t, cell).adjoint() * state.receiver(cfg, m, t));
        }
    }
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut interference = ComplexMatrix::zeros(cfg.tx_antennas, cols);
    let mut c = 0;
    for b in &blocks {
        interference.view_mut((0, c), b.shape()).copy_from(b);
        c += b.ncols();
    }
    (desired, interference)
}

/// Orthogonality-based coordinate ascent.
pub fn o_algorithm(cfg: &SystemConfig, channels: &ChannelSet) -> Result<SearchResult> {
    let mut run = Ascent::start(cfg, channels)?;
    for l in 0..cfg.num_cells {
        for k in 0..cfg.select_per_cell {
            let mut winner: Option<(usize, f64, GroupingResult)> = None;
            for j in candidates(cfg, &run.subsets[l], k) {
                run.trace.candidate_evaluations += 1;
                let mut temp = run.subsets.clone();
                temp[l][k] = j;
                let scored = regroup(cfg, channels, l, &temp[l]).and_then(|g| {
                    let (a, b) =
                        reciprocal_spaces(cfg, channels, &temp, &run.system.state, l, j, &g);
                    Ok((orthogonality_metric(&a, &b)?, g))
                });
                match scored {
                    Ok((metric, g)) => {
                        if winner.as_ref().is_none_or(|(_, w, _)| metric > *w) {
                            winner = Some((j, metric, g));
                        }
                    }
                    Err(_) => run.trace.skipped_candidates += 1,
                }
            }
            let Some((p, _, grouping)) = winner else {
                continue;
            };
            let mut temp = run.subsets.clone();
            temp[l][k] = p;
            run.trace.rate_evaluations += 1;
            match rate_with_cell(cfg, channels, &run.system, &temp, l, grouping) {
                Ok(sys) => run.offer(l, k, p, sys),
                Err(_) => run.trace.skipped_candidates += 1,
            }
        }
    }
    Ok(run.finish())
}

/// All K-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            break;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

/// Exhaustive search over every tuple of per-cell subsets.
///
/// Groupings depend only on one cell's subset, so each is solved once and
/// reused across tuples. Ties go to the lexicographically smallest tuple.
pub fn brute_force_select(
    cfg: &SystemConfig,
    channels: &ChannelSet,
    cap: u128,
) -> Result<SearchResult> {
    cfg.validate()?;
    let count = brute_force_combinations(
        cfg.users_per_cell as u64,
        cfg.select_per_cell as u64,
        cfg.num_cells as u64,
    );
    if count > cap.into() {
        return Err(Error::SearchSpaceTooLarge {
            count: count.to_string(),
            cap,
        });
    }
    let subsets = combinations(cfg.users_per_cell, cfg.select_per_cell);
    let groupings: Vec<Vec<Result<GroupingResult>>> = (0..cfg.num_cells)
        .map(|bs| {
            subsets
                .iter()
                .map(|s| group_cell(cfg, channels, bs, s))
                .collect()
        })
        .collect();

    let mut trace = SelectionTrace::default();
    let mut best: Option<AlignedSystem> = None;
    let mut last_err = None;
    let mut digits = vec![0usize; cfg.num_cells];
    loop {
        trace.candidate_evaluations += 1;
        trace.rate_evaluations += 1;
        let tuple: Vec<Vec<usize>> = digits.iter().map(|&d| subsets[d].clone()).collect();
        let state = (0..cfg.num_cells)
            .map(|bs| match &groupings[bs][digits[cfg.next_cell(bs)]] {
                Ok(g) => Ok(g.clone()),
                Err(e) => Err(Error::InvalidInput(format!("grouping failed: {e}"))),
            })
            .collect::<Result<Vec<_>>>();
        let evaluated = state.and_then(|groupings| {
            AlignedSystem::from_state(cfg, channels, tuple, AlignmentState { groupings })
        });
        match evaluated {
            Ok(sys) => {
                if best.as_ref().is_none_or(|b| sys.rate.total > b.rate.total) {
                    best = Some(sys);
                }
            }
            Err(e) => {
                trace.skipped_candidates += 1;
                last_err = Some(e);
            }
        }
        // advance the mixed-radix counter, last cell fastest
        let Some(pos) = (0..cfg.num_cells)
            .rev()
            .find(|&i| digits[i] + 1 < subsets.len())
        else {
            break;
        };
        digits[pos] += 1;
        for d in digits.iter_mut().skip(pos + 1) {
            *d = 0;
        }
    }
    let system = match best {
        Some(s) => s,
        None => return Err(last_err.expect("at least one tuple was tried")),
    };
    trace.initial_rate = 0.0;
    let selection = Selection {
        subsets: system.subsets.clone(),
        achieved_rate: system.rate.total,
    };
    Ok(SearchResult {
        selection,
        trace,
        system,
    })
}
