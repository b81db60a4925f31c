//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use ifbc::align::AlignedSystem;
use ifbc::linalg::ComplexMatrix;
use ifbc::system::{ChannelSet, SystemConfig};
use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;

/// Water level by bisection on Σ max(0, μ − 1/g) = P.
pub fn water_fill_bisection(gains: &[f64], budget: f64) -> Vec<f64> {
    let inv: Vec<f64> = gains.iter().map(|g| 1.0 / g).collect();
    let (mut lo, mut hi) = (0.0, budget + inv.iter().cloned().fold(0.0, f64::max));
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let used: f64 = inv.iter().map(|i| (mid - i).max(0.0)).sum();
        if used > budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    inv.iter().map(|i| (mu - i).max(0.0)).collect()
}

fn hermitian_eigen(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let sym = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

fn log2_det(a: &ComplexMatrix) -> f64 {
    a.clone().lu().determinant().re.log2()
}

/// Sum rate in determinant form: per cell, log₂det(UᴴU + H̄QH̄ᴴ/σ²) − log₂det(UᴴU)
/// with the covariances Q from a bisection water-fill over the eigenmodes of
/// H̄ᴴ(UᴴU)⁻¹H̄. No inverse square root and no SVD.
pub fn determinant_sum_rate(cfg: &SystemConfig, channels: &ChannelSet, sys: &AlignedSystem) -> f64 {
    let mut total = 0.0;
    for (l, users) in sys.subsets.iter().enumerate() {
        let mut modes = Vec::new();
        for (slot, &k) in users.iter().enumerate() {
            let u = sys.state.receiver(cfg, l, k);
            let v = &sys.precoders.per_cell[l][slot];
            let h_bar = u.adjoint() * channels.get(l, k, l) * v;
            let gram = u.adjoint() * u;
            let gram_inv = gram.clone().try_inverse().expect("UᴴU invertible");
            let (vals, vecs) = hermitian_eigen(&(h_bar.adjoint() * &gram_inv * &h_bar));
            modes.push((gram, h_bar, vals, vecs));
        }
        let gains: Vec<(usize, usize, f64)> = modes
            .iter()
            .enumerate()
            .flat_map(|(i, m)| {
                m.2.iter()
                    .enumerate()
                    .filter(|(_, &g)| g > 0.0)
                    .map(move |(j, &g)| (i, j, g / cfg.noise_var))
            })
            .collect();
        let powers =
            water_fill_bisection(&gains.iter().map(|g| g.2).collect::<Vec<_>>(), cfg.bs_power);
        for (i, (gram, h_bar, _, vecs)) in modes.iter().enumerate() {
            let ds = vecs.ncols();
            let mut q = ComplexMatrix::zeros(ds, ds);
            for ((owner, j, _), p) in gains.iter().zip(&powers) {
                if *owner == i {
                    let e = vecs.column(*j);
                    q += e * e.adjoint() * Complex64::new(*p, 0.0);
                }
            }
            let signal = h_bar * q * h_bar.adjoint() * Complex64::new(1.0 / cfg.noise_var, 0.0);
            total += log2_det(&(gram + signal)) - log2_det(gram);
        }
    }
    total
}

fn svd(n: u128, m: u128) -> u128 {
    24 * n * m * m + 48 * n * n * m + 54 * n * n * n
}

/// Joint receive-beamformer cost, or the decoupled recursion with every
/// stage dimension floored at 1.
pub fn psi_u(m: u128, n: u128, k: u128, decoupled: bool) -> u128 {
    if !decoupled {
        return svd(k * m, m + k * n);
    }
    let mut total = k * svd(m, m + n);
    let mut s_i: i128 = 0;
    let mut i = 1u32;
    while (1u128 << (i - 1)) < k {
        let s_next = 2 * s_i + 1;
        let a = ((1i128 << (i - 1)) * n as i128 - s_i * m as i128).max(1) as u128;
        let b = ((1i128 << i) * n as i128 - s_next * m as i128).max(1) as u128;
        let groups = k.div_ceil(1u128 << i);
        total += groups * (svd(m, a) + 8 * m * a * b) + k * 8 * n * a * b;
        s_i = s_next;
        i += 1;
    }
    total
}

/// Orthogonality search cost, term by term.
pub fn psi_o(m: u128, n: u128, k: u128, l: u128, k_t: u128, ds: u128, decoupled: bool) -> u128 {
    let pu = psi_u(m, n, k, decoupled);
    let q = k * (l - 1);
    let step = pu + 8 * m * m * ds - 2 * m * ds + 8 * m * n * ds * q + 8 * m * m * q * ds
        - 2 * m * q * ds
        + 8 * m * m * ds
        + 8 * m * m * q * ds
        + 6 * m * m;
    4 * k_t * l * m * n + l * pu + step * (k_t - k + 1) * k * l
}

/// Sum-rate search cost, term by term.
pub fn psi_s(m: u128, n: u128, k: u128, l: u128, k_t: u128, ds: u128, decoupled: bool) -> u128 {
    let pu = psi_u(m, n, k, decoupled);
    let link = 8 * ds * ds * n + 8 * n * m * ds + 8 * m * ds * ds + 8 * ds * ds * ds;
    let step = pu + k * l * (svd(m, k * (l - 1) * ds) + link);
    4 * k_t * l * m * n + l * pu + step * (k_t - k + 1) * k * l
}

fn choose(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Exhaustive search cost.
pub fn psi_brute(m: u128, n: u128, k: u128, l: u128, k_t: u128, ds: u128, decoupled: bool) -> u128 {
    let pu = psi_u(m, n, k, decoupled);
    let link = 8 * ds * ds * n + 8 * n * m * ds + 8 * m * ds * ds + 8 * ds * ds * ds;
    choose(k_t, k).pow(l as u32) * (k * l * svd(m, k * (l - 1) * ds) + l * pu + k * l * link)
}
