use ifbc::flops::{
    brute_force_combinations, flops_brute_force, flops_o_algorithm, flops_s_algorithm, FlopParams,
    UMethod,
};
use ifbc::linalg::{chordal_distance, gso, water_fill, ComplexMatrix};
use ifbc::select::{o_algorithm, s_algorithm};
use ifbc::system::{generate_channels, SystemConfig};
use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;

fn complex_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols).prop_map(move |v| {
        ComplexMatrix::from_iterator(
            rows,
            cols,
            v.into_iter().map(|(re, im)| Complex64::new(re, im)),
        )
    })
}

/// A random unitary from the QR of a random square matrix.
fn unitary(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_matrix(n, n).prop_filter_map("singular draw", |a| {
        gso(&a).ok().map(|b| b.into_generator())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn chordal_distance_bounds(
        (a, b) in (2usize..7).prop_flat_map(|m| (1..=m, 1..=m).prop_flat_map(move |(p, q)| (complex_matrix(m, p), complex_matrix(m, q))))
    ) {
        let (Ok(p), Ok(q)) = (gso(&a), gso(&b)) else { return Ok(()) };
        let d = chordal_distance(&p, &q).unwrap();
        let (dp, dq) = (p.dim() as f64, q.dim() as f64);
        prop_assert!(d >= 0.0);
        // ‖P − Q‖²_F = p + q − 2‖AᴴB‖²_F, halved
        prop_assert!(d <= ((dp + dq) / 2.0).sqrt() + 1e-12);
        prop_assert!(d >= ((dp - dq).abs() / 2.0).sqrt() - 1e-9);
        if p.dim() == q.dim() {
            prop_assert!(d <= dp.min(dq).sqrt() + 1e-12);
        }
        prop_assert!((d - chordal_distance(&q, &p).unwrap()).abs() < 1e-14);
        prop_assert!(chordal_distance(&p, &p).unwrap() < 1e-12);
    }

    #[test]
    fn chordal_distance_is_basis_independent(
        (a, b, w) in (2usize..6).prop_flat_map(|m| (1..=m).prop_flat_map(move |p| (complex_matrix(m, p), complex_matrix(m, 2.min(m)), unitary(p))))
    ) {
        let (Ok(p), Ok(q)) = (gso(&a), gso(&b)) else { return Ok(()) };
        let rotated = gso(&(p.generator() * &w)).unwrap();
        let d0 = chordal_distance(&p, &q).unwrap();
        let d1 = chordal_distance(&rotated, &q).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-10);
    }

    #[test]
    fn water_fill_satisfies_kkt(
        gains in prop::collection::vec(1e-3..1e3f64, 1..16),
        budget in 1e-3..1e3f64,
    ) {
        let alloc = water_fill(&gains, budget).unwrap();
        let mu = alloc.water_level;
        let used: f64 = alloc.powers.iter().sum();
        prop_assert!((used - budget).abs() <= 1e-9 * budget.max(1.0));
        for (&g, &p) in gains.iter().zip(&alloc.powers) {
            prop_assert!(p >= 0.0);
            if p > 0.0 {
                prop_assert!((p + 1.0 / g - mu).abs() <= 1e-9 * mu.max(1.0));
            } else {
                prop_assert!(1.0 / g >= mu - 1e-9 * mu.max(1.0));
            }
        }
        // stronger channels never get less power
        for i in 0..gains.len() {
            for j in 0..gains.len() {
                if gains[i] > gains[j] {
                    prop_assert!(alloc.powers[i] >= alloc.powers[j] - 1e-12);
                }
            }
        }
    }

    #[test]
    fn heuristic_flops_are_affine_in_population(
        m in 2u64..12, n_off in 1u64..6, k in 1u64..6, l in 2u64..5, ds in 1u64..3, k_t in 0u64..50, decoupled: bool,
    ) {
        let n = m.saturating_sub(n_off).max(1);
        let method = if decoupled { UMethod::Decoupled } else { UMethod::Joint };
        let p = FlopParams { m, n, k, l, k_t: k + k_t, ds, u_method: method };
        for f in [flops_o_algorithm, flops_s_algorithm] {
            let a = BigInt::from(f(&p).0);
            let b = BigInt::from(f(&p.with_users(p.k_t + 1)).0);
            let c = BigInt::from(f(&p.with_users(p.k_t + 2)).0);
            prop_assert_eq!(&c - &b * 2 + &a, BigInt::from(0));
            prop_assert!(b > a);
        }
    }

    #[test]
    fn flop_ordering_above_the_smallest_population(
        cfg_large: bool, extra in 1u64..30, l in 2u64..4,
    ) {
        let base = if cfg_large { SystemConfig::large() } else { SystemConfig::small() };
        let p = FlopParams { l, ..FlopParams::from_config(&base) }.with_users(base.select_per_cell as u64 + extra);
        let (b, s, o) = (flops_brute_force(&p), flops_s_algorithm(&p), flops_o_algorithm(&p));
        prop_assert!(b > s, "brute {} vs s {}", b, s);
        prop_assert!(s > o);
    }

    #[test]
    fn tuple_count_is_binomial_power(k_t in 2u64..40, k in 1u64..4, l in 1u64..4) {
        let expected: BigInt = (0..k).fold(BigInt::from(1), |acc, i| acc * (k_t - i) / (i + 1)).pow(l as u32);
        prop_assert_eq!(BigInt::from(brute_force_combinations(k_t, k, l)), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ascent_never_ends_below_its_start(seed: u64, k_t in 3usize..7, snr in 0.0..30.0f64, large: bool) {
        let base = if large { SystemConfig::large() } else { SystemConfig::small() };
        let cfg = base.with_users(k_t).with_snr_db(snr);
        let ch = generate_channels(&cfg, seed).unwrap();
        for out in [s_algorithm(&cfg, &ch).unwrap(), o_algorithm(&cfg, &ch).unwrap()] {
            prop_assert!(out.selection.is_valid(&cfg));
            prop_assert!(out.selection.achieved_rate >= out.trace.initial_rate);
            let mut last = out.trace.initial_rate;
            for step in &out.trace.accepted_steps {
                prop_assert!(step.rate_after > step.rate_before);
                prop_assert_eq!(step.rate_before, last);
                last = step.rate_after;
            }
            prop_assert_eq!(last, out.selection.achieved_rate);
        }
    }
}
