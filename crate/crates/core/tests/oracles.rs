mod common;

use common::*;
use multiphoton::coherence::{bound_gm, coherence_gm, coherence_gm_pure};
use multiphoton::fock::{falling_factorial, PureFockState};
use multiphoton::optimizer::{optimize_gm_exact, random_search_lower_bound, verify_state_bound};
use multiphoton::zoo::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn squeezed_matches_matrix_exponential() {
    // 160 levels keep the truncated generator's edge effects below 1e-13 on
    // the first 41 amplitudes up to r = 1.5
    for &r in &[0.0, 0.2, 0.7, 1.0, 1.5] {
        for &theta in &[0.0, 0.7, -2.0] {
            let brute = squeezed_brute_force(r, theta, 160);
            let state = squeezed_vacuum(r, theta, 400).unwrap();
            for n in 0..41 {
                let d = (state.amplitude(n) - brute[n]).norm();
                assert!(d < 1e-8, "r={r} theta={theta} n={n}: {d}");
            }
        }
    }
}

#[test]
fn squeezed_populations_match_closed_form() {
    for &r in &[0.1, 0.5, 1.0, 2.0, 2.65] {
        let state = squeezed_vacuum(r, 0.3, 8000).unwrap().dephase();
        let oracle = squeezed_populations_closed_form(r, 8000);
        for n in (0..400).step_by(2) {
            assert!(
                (state.probability(n) - oracle[n]).abs() <= 1e-12 * oracle[0],
                "r={r} n={n}"
            );
        }
    }
}

#[test]
fn squeezed_ratio_against_fock_summation() {
    // g2 = 3 + 1/n_av for squeezed vacuum
    let mut r = 0.1;
    while r <= 2.65 + 1e-12 {
        let built = build_state(&StateSpec::new(StateKind::SqueezedVacuum).with("xi", r), 500)
            .unwrap();
        let ratio = coherence_gm(&built.distribution, 2).unwrap().ratio.unwrap();
        let cutoff = 2 * built.distribution.cutoff();
        let p = squeezed_populations_closed_form(r, cutoff);
        let oracle = factorial_moment(&p, 2) / mean(&p).powi(2);
        let closed = 3.0 + 1.0 / r.sinh().powi(2);
        assert!(rel(ratio, oracle) < 1e-6, "r={r}: {ratio} vs {oracle}");
        assert!(rel(ratio, closed) < 1e-6, "r={r}: {ratio} vs {closed}");
        r += 0.05;
    }
}

#[test]
fn thermal_tail_closed_form() {
    let d = thermal_state(10.0, 2000).unwrap();
    let expected = (10.0f64 / 11.0).powi(501);
    assert!(rel(d.tail_mass(500), expected) < 1e-9);
    assert!((expected - 1.8e-21).abs() < 0.1e-21);
}

#[test]
fn coherent_tail_below_chernoff_bound() {
    let d = coherent_state(50.0, 1200).unwrap().dephase();
    let tail = d.tail_mass(500);
    // P(N > k) <= e^{-μ} (eμ/k)^k for k > μ
    let (mu, k) = (50.0f64, 501.0f64);
    let ln_bound = -mu + k * (1.0 + mu.ln() - k.ln());
    assert!(tail < 1e-100);
    assert!(tail == 0.0 || tail.ln() <= ln_bound);
}

#[test]
fn coherent_factorial_moments() {
    // Poisson: E[n!/(n-m)!] = n̄^m
    for &n_av in &[0.3, 1.0, 10.0, 120.0] {
        let b = build_state(&StateSpec::new(StateKind::Coherent).with("n_av", n_av), 500).unwrap();
        for m in 1..=4 {
            let g = coherence_gm(&b.distribution, m).unwrap();
            assert!(rel(g.value, n_av.powi(m as i32)) < 1e-9, "n_av={n_av} m={m}");
            assert!(rel(g.value, factorial_moment(b.distribution.probabilities(), m)) < 1e-12);
        }
    }
}

#[test]
fn thermal_factorial_moments() {
    // geometric: E[n!/(n-m)!] = m! n̄^m
    for &n_av in &[0.1, 1.0, 10.0, 50.0] {
        let b = build_state(&StateSpec::new(StateKind::Thermal).with("n_av", n_av), 500).unwrap();
        for m in 1..=4u32 {
            let g = coherence_gm(&b.distribution, m).unwrap();
            let fact: f64 = (1..=m).map(f64::from).product();
            assert!(rel(g.value, fact * n_av.powi(m as i32)) < 1e-9, "n_av={n_av} m={m}");
        }
    }
}

#[test]
fn mixture_scaling_in_higher_orders() {
    let b = build_state(
        &StateSpec::new(StateKind::CoinCoherentMixture).with("n_av", 10.0),
        500,
    )
    .unwrap();
    for m in 2..=4 {
        let g = coherence_gm(&b.distribution, m).unwrap().value;
        assert!(rel(g, 10.0 * 500f64.powi(m as i32 - 1)) < 1e-6);
    }
}

#[test]
fn bound_saturated_by_coin_mixture() {
    for n_max in [2usize, 3, 7, 40, 120, 500] {
        for m in 2..=6u32.min(n_max as u32) {
            for k in 0..=10 {
                let n_av = n_max as f64 * k as f64 / 10.0;
                let g = coherence_gm(&coin_mixture(n_av, n_max).unwrap(), m).unwrap().value;
                let b = bound_gm(m, n_av, n_max as u64).unwrap();
                assert!((g - b).abs() <= 1e-12 * b.max(1e-300), "N={n_max} m={m} n_av={n_av}");
            }
        }
    }
}

#[test]
fn optimizer_matches_bound_and_coin() {
    for m in 2..=4u32 {
        for n_max in m as usize..=40 {
            for k in 1..=8 {
                let n_av = n_max as f64 * k as f64 / 9.0;
                let r = optimize_gm_exact(m, n_av, n_max).unwrap();
                let b = bound_gm(m, n_av, n_max as u64).unwrap();
                assert!(rel(r.optimal_value, b) < 1e-9);
                assert_eq!(r.support, vec![0, n_max]);
            }
        }
    }
}

#[test]
fn random_search_never_beats_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let m = rng.random_range(2..=5u32);
        let n_max = rng.random_range(m as usize..=30);
        let n_av = rng.random::<f64>() * n_max as f64;
        let seed = rng.random::<u64>();
        let exact = optimize_gm_exact(m, n_av, n_max).unwrap().optimal_value;
        let lower = random_search_lower_bound(m, n_av, n_max, 200, seed).unwrap();
        assert!(lower <= exact + 1e-12 * exact.abs(), "m={m} N={n_max} n_av={n_av}");
    }
}

#[test]
fn degenerate_optima() {
    for n_max in [2usize, 9, 40] {
        for m in 2..=4u32.min(n_max as u32) {
            let zero = optimize_gm_exact(m, 0.0, n_max).unwrap();
            assert_eq!(zero.optimal_value, 0.0);
            assert_eq!(zero.support, vec![0]);
            let full = optimize_gm_exact(m, n_max as f64, n_max).unwrap();
            assert_eq!(full.optimal_value, falling_factorial(n_max as u64, m as u64));
            assert_eq!(full.support, vec![n_max]);
        }
    }
}

#[test]
fn random_states_respect_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..1000 {
        let p = if i % 2 == 0 {
            random_simplex(&mut rng, 31)
        } else {
            random_sparse(&mut rng, 31)
        };
        let d = multiphoton::fock::PhotonNumberDistribution::new(p).unwrap();
        for m in 2..=6 {
            let r = verify_state_bound(&d, m, 30).unwrap();
            assert!(r.in_space);
            assert!(!r.violation);
            assert!(r.slack >= -1e-12 * r.bound);
        }
    }
}

fn random_pure_state() -> impl Strategy<Value = PureFockState> {
    prop::collection::vec((0.0f64..1.0, -3.2f64..3.2), 1..=101).prop_filter_map(
        "zero norm",
        |v| {
            let norm: f64 = v.iter().map(|(a, _)| a * a).sum::<f64>().sqrt();
            if norm == 0.0 {
                return None;
            }
            let amps: Vec<Complex64> = v
                .iter()
                .map(|&(a, phi)| Complex64::from_polar(a / norm, phi))
                .collect();
            PureFockState::from_amplitudes(&amps).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dephasing_leaves_gm_unchanged(state in random_pure_state(), m in 1u32..=5) {
        let a = coherence_gm_pure(&state, m).unwrap();
        let b = coherence_gm(&state.dephase(), m).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn constructed_states_keep_mean(n_av in 0.0f64..60.0, kind in 0usize..3) {
        let kind = [StateKind::Coherent, StateKind::Thermal, StateKind::SqueezedVacuum][kind];
        let b = build_state(&StateSpec::new(kind).with("n_av", n_av), 500).unwrap();
        let total: f64 = b.distribution.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!((b.distribution.mean_photon_number() - n_av).abs() < 1e-9 * n_av.max(1.0));
    }

    #[test]
    fn coin_phase_is_invisible(n_av in 0.0f64..1.0, n_max in 1usize..600, phase in -10.0f64..10.0) {
        let n_av = n_av * n_max as f64;
        let reference = coin_state(n_av, n_max, 0.0).unwrap().dephase();
        prop_assert_eq!(coin_state(n_av, n_max, phase).unwrap().dephase(), reference.clone());
        prop_assert_eq!(coin_mixture(n_av, n_max).unwrap(), reference);
    }
}
