//! Closed-form flop counts for the grouping, the two linear-search selection
//! algorithms and exhaustive search.
//!
//! A real multiply or add is one flop, so a complex multiply costs six and a
//! complex add two. Water-filling, the small d_s×d_s inverse and the rate
//! logarithms are not counted. All arithmetic is exact.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// How the receive beamformers of one cell are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UMethod {
    /// One SVD of the full KM × (M+KN) grouping matrix.
    Joint,
    /// Recursive intersection of pairwise null spaces.
    Decoupled,
}

impl UMethod {
    /// Joint for K ≤ 3, decoupled above.
    pub fn default_for(select_per_cell: usize) -> Self {
        if select_per_cell <= 3 {
            UMethod::Joint
        } else {
            UMethod::Decoupled
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlopParams {
    pub m: u64,
    pub n: u64,
    pub k: u64,
    pub l: u64,
    pub k_t: u64,
    pub ds: u64,
    pub u_method: UMethod,
}

impl FlopParams {
    pub fn from_config(cfg: &crate::system::SystemConfig) -> Self {
        Self {
            m: cfg.tx_antennas as u64,
            n: cfg.rx_antennas as u64,
            k: cfg.select_per_cell as u64,
            l: cfg.num_cells as u64,
            k_t: cfg.users_per_cell as u64,
            ds: cfg.streams_per_user as u64,
            u_method: UMethod::default_for(cfg.select_per_cell),
        }
    }

    pub fn with_users(self, k_t: u64) -> Self {
        Self { k_t, ..self }
    }

    pub fn with_u_method(self, u_method: UMethod) -> Self {
        Self { u_method, ..self }
    }
}

/// An exact flop count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FlopCount(pub BigUint);

impl FlopCount {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.0.to_u128()
    }
}

impl fmt::Display for FlopCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn svd_big(n: &BigUint, m: &BigUint) -> BigUint {
    BigUint::from(24u32) * n * m * m
        + BigUint::from(48u32) * n * n * m
        + BigUint::from(54u32) * n * n * n
}

/// Approximate cost of the SVD of an n×m complex matrix: 24nm² + 48n²m + 54n³.
pub fn flops_svd(n: u64, m: u64) -> FlopCount {
    FlopCount(svd_big(&big(n), &big(m)))
}

/// Per-stage dimensions of the decoupled recursion, before clamping.
///
/// Stage `i` (1-based) works with `2^{i-1}N − s_i M` and `2^i N − s_{i+1} M`
/// columns, where `s_1 = 0` and `s_i = 2 s_{i-1} + 1`.
pub fn decoupled_stage_dims(p: &FlopParams) -> Vec<(i128, i128)> {
    let stages = ceil_log2(p.k);
    let (n, m) = (p.n as i128, p.m as i128);
    let mut s = 0i128;
    (1..=stages)
        .map(|i| {
            let next = 2 * s + 1;
            let a = (1i128 << (i - 1)) * n - s * m;
            let b = (1i128 << i) * n - next * m;
            s = next;
            (a, b)
        })
        .collect()
}

/// True when some decoupled stage dimension is nonpositive and gets clamped to 1.
pub fn decoupled_clamped(p: &FlopParams) -> bool {
    decoupled_stage_dims(p).iter().any(|&(a, b)| a < 1 || b < 1)
}

fn ceil_log2(k: u64) -> u32 {
    if k <= 1 {
        0
    } else {
        64 - (k - 1).leading_zeros()
    }
}

/// Cost of computing the receive beamformers of one cell.
pub fn flops_receive_beamformers(p: &FlopParams) -> FlopCount {
    let (m, n, k) = (big(p.m), big(p.n), big(p.k));
    match p.u_method {
        UMethod::Joint => FlopCount(svd_big(&(&k * &m), &(&m + &k * &n))),
        UMethod::Decoupled => {
            let mut total = &k * svd_big(&m, &(&m + &n));
            for (i, (a, b)) in decoupled_stage_dims(p).into_iter().enumerate() {
                let a = BigUint::from(a.max(1) as u128);
                let b = BigUint::from(b.max(1) as u128);
                let width = 1u64 << (i + 1);
                let groups = big(p.k.div_ceil(width));
                let stage = svd_big(&m, &a) + BigUint::from(8u32) * &m * &a * &b;
                total += groups * stage + &k * BigUint::from(8u32) * &n * &a * &b;
            }
            FlopCount(total)
        }
    }
}

fn initial_and_grouping(p: &FlopParams, psi_u: &BigUint) -> BigUint {
    BigUint::from(4u32) * big(p.k_t) * big(p.l) * big(p.m) * big(p.n) + big(p.l) * psi_u
}

fn scan_multiplier(p: &FlopParams) -> BigUint {
    (big(p.k_t) + 1u32 - big(p.k)) * big(p.k) * big(p.l)
}

/// Cost of whitening and forming the effective channel of one user.
fn rate_terms(p: &FlopParams) -> BigUint {
    let (m, n, ds) = (big(p.m), big(p.n), big(p.ds));
    BigUint::from(8u32) * (&ds * &ds * &n + &n * &m * &ds + &m * &ds * &ds + &ds * &ds * &ds)
}

/// Orthogonality-based linear search.
pub fn flops_o_algorithm(p: &FlopParams) -> FlopCount {
    let psi_u = flops_receive_beamformers(p).0;
    let (m, n, ds) = (big(p.m), big(p.n), big(p.ds));
    let interferers = big(p.k * (p.l - 1));
    let eight = BigUint::from(8u32);
    let two = BigUint::from(2u32);
    let b_cols = &interferers * &ds;
    let per_candidate = &psi_u
        // A_G: GSO
        + &eight * &m * &m * &ds - &two * &m * &ds
        // B_G: products, then GSO
        + &eight * &m * &n * &ds * &interferers
        + &eight * &m * &m * &b_cols - &two * &m * &b_cols
        // projectors and the norm of their difference
        + &eight * &m * &m * &ds
        + &eight * &m * &m * &b_cols
        + BigUint::from(6u32) * &m * &m;
    FlopCount(initial_and_grouping(p, &psi_u) + per_candidate * scan_multiplier(p))
}

/// Sum-rate-based linear search.
pub fn flops_s_algorithm(p: &FlopParams) -> FlopCount {
    let psi_u = flops_receive_beamformers(p).0;
    let kl = big(p.k * p.l);
    let psi_v = svd_big(&big(p.m), &big(p.k * (p.l - 1) * p.ds));
    let per_candidate = &psi_u + kl * (psi_v + rate_terms(p));
    FlopCount(initial_and_grouping(p, &psi_u) + per_candidate * scan_multiplier(p))
}

/// Binomial coefficient C(n, k), exact.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * big(n - i) / big(i + 1);
    }
    acc
}

/// Number of subset tuples visited by exhaustive search: C(K_T, K)^L.
pub fn brute_force_combinations(k_t: u64, k: u64, l: u64) -> BigUint {
    num_traits::pow(binomial(k_t, k), l as usize)
}

/// Exhaustive search over every tuple of per-cell subsets.
pub fn flops_brute_force(p: &FlopParams) -> FlopCount {
    let psi_u = flops_receive_beamformers(p).0;
    let kl = big(p.k * p.l);
    let psi_v = svd_big(&big(p.m), &big(p.k * (p.l - 1) * p.ds));
    let per_tuple = &kl * psi_v + big(p.l) * psi_u + &kl * rate_terms(p);
    FlopCount(brute_force_combinations(p.k_t, p.k, p.l) * per_tuple)
}
