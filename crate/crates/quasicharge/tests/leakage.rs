mod common;

use common::*;
use proptest::prelude::*;
use quasicharge::hilbert::ChargeGrid;
use quasicharge::leakage::{
    bdg_solve, coefficients_ab, golden_rule_rate, leakage_scan, NoiseSpectrum, Side, DEFAULT_F_MAX,
};
use quasicharge::model::{
    build_kitaev_fermionic, transmon_eigenbasis, ChainParams, PairingPhase, TransmonEigenbasis,
    TransmonParams,
};
use quasicharge::C64;
use rand::Rng;

fn basis() -> TransmonEigenbasis {
    transmon_eigenbasis(&TransmonParams::reference(), &ChargeGrid::new(8.5).unwrap()).unwrap()
}

#[test]
fn bdg_many_body_spectrum_matches_brute_force() {
    let mut r = rng(2024);
    let mut checked = 0;
    while checked < 24 {
        let t = r.gen_range(1.0..20.0);
        let cp = ChainParams::new(
            r.gen_range(-1.95 * t..1.95 * t),
            t,
            r.gen_range(0.5..20.0),
            2 + checked % 2,
        )
        .unwrap();
        let h = build_kitaev_fermionic(&cp, PairingPhase::Fixed(C64::new(1.0, 0.0)))
            .unwrap()
            .to_dense();
        let exact = oracle_spectrum(&h);
        for side in [Side::Left, Side::Right] {
            let sol = bdg_solve(&cp, side).unwrap();
            assert!(sol.unitarity_error() < 1e-10);
            for (a, b) in exact.iter().zip(sol.many_body_spectrum()) {
                assert!((a - b).abs() < 1e-9, "{cp:?}: {a} vs {b}");
            }
        }
        checked += 1;
    }
}

#[test]
fn sweet_spot_zero_mode_is_exact_up_to_twelve_sites() {
    for l in 2..=12 {
        let cp = ChainParams::sweet_spot(12.0, l);
        for side in [Side::Left, Side::Right] {
            let sol = bdg_solve(&cp, side).unwrap();
            assert!(sol.energies[0].abs() <= 1e-12 * 12.0);
            // every other mode sits at 2 w_F
            assert!(sol.energies[1..].iter().all(|e| (e - 24.0).abs() < 1e-10));
        }
    }
}

#[test]
fn sweet_spot_plateau() {
    let b = basis();
    let s = NoiseSpectrum::white_from_alpha(0.03).unwrap();
    let lengths: Vec<usize> = (2..=12).collect();
    let rows = leakage_scan(&b, &[(0.0, 12.0)], &lengths, &s).unwrap();
    let g: Vec<f64> = rows.iter().map(|r| r.gamma).collect();
    let (lo, hi) = g[3..]
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, c), &x| (a.min(x), c.max(x)));
    assert!((hi - lo) / lo <= 0.05);
    assert!(rows.iter().all(|r| r.converged && !r.untrusted));
}

#[test]
fn detuned_plateau_beyond_five_sites() {
    let b = basis();
    let s = NoiseSpectrum::white_from_alpha(0.03).unwrap();
    let lengths: Vec<usize> = (5..=12).collect();
    for mu in [8.0, 12.0] {
        let rows = leakage_scan(&b, &[(mu, 12.0)], &lengths, &s).unwrap();
        let g: Vec<f64> = rows.iter().map(|r| r.gamma).collect();
        let (lo, hi) = g
            .iter()
            .fold((f64::MAX, f64::MIN), |(a, c), &x| (a.min(x), c.max(x)));
        assert!((hi - lo) / lo <= 0.05, "mu = {mu}: {g:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rate_is_linear_in_noise(mu in -20.0f64..20.0, l in 2usize..8, level in 1e-4f64..1.0) {
        let b = transmon_eigenbasis(&TransmonParams::reference(), &ChargeGrid::new(4.5).unwrap()).unwrap();
        let cp = ChainParams::new(mu, 12.0, 12.0, l).unwrap();
        let ab = coefficients_ab(&bdg_solve(&cp, Side::Left).unwrap(), &bdg_solve(&cp, Side::Right).unwrap()).unwrap();
        let s = NoiseSpectrum::white(level).unwrap();
        let one = golden_rule_rate(&b, &ab, &s, 0, DEFAULT_F_MAX).unwrap().gamma;
        let two = golden_rule_rate(&b, &ab, &s.scaled(2.0), 0, DEFAULT_F_MAX).unwrap().gamma;
        prop_assert!((two - 2.0 * one).abs() <= 4.0 * f64::EPSILON * two);
        prop_assert!(one > 0.0);
    }

    #[test]
    fn channels_are_non_negative(mu in -20.0f64..20.0, l in 2usize..6) {
        let b = transmon_eigenbasis(&TransmonParams::reference(), &ChargeGrid::new(4.5).unwrap()).unwrap();
        let cp = ChainParams::new(mu, 12.0, 12.0, l).unwrap();
        let ab = coefficients_ab(&bdg_solve(&cp, Side::Left).unwrap(), &bdg_solve(&cp, Side::Right).unwrap()).unwrap();
        let res = golden_rule_rate(&b, &ab, &NoiseSpectrum::white(1.0).unwrap(), 1, DEFAULT_F_MAX).unwrap();
        prop_assert!(res.channels.iter().all(|c| c.rate >= 0.0));
        let total: f64 = res.channels.iter().map(|c| c.rate).sum();
        prop_assert!((total - res.gamma).abs() < 1e-12 * total.max(1.0));
    }
}

#[test]
fn colored_noise_weights_channels_by_energy() {
    let b = basis();
    let cp = ChainParams::sweet_spot(12.0, 3);
    let ab = coefficients_ab(
        &bdg_solve(&cp, Side::Left).unwrap(),
        &bdg_solve(&cp, Side::Right).unwrap(),
    )
    .unwrap();
    let flat = NoiseSpectrum::tabulated(vec![0.0, 100.0], vec![1.0, 1.0]).unwrap();
    let white = NoiseSpectrum::white(1.0).unwrap();
    let g_flat = golden_rule_rate(&b, &ab, &flat, 0, 12).unwrap().gamma;
    let g_white = golden_rule_rate(&b, &ab, &white, 0, 12).unwrap().gamma;
    assert!((g_flat - g_white).abs() < 1e-12 * g_white);
    // Cutting off everything above the quasiparticle gap keeps only the
    // pure transmon excitations.
    let low = NoiseSpectrum::tabulated(vec![0.0, 10.0, 10.001], vec![1.0, 1.0, 0.0]).unwrap();
    let res = golden_rule_rate(&b, &ab, &low, 0, 12).unwrap();
    let transmon_only: f64 = golden_rule_rate(&b, &ab, &white, 0, 12)
        .unwrap()
        .channels
        .iter()
        .filter(|c| c.n == 0 && c.m == 0 && c.f <= res.f_max)
        .map(|c| c.rate)
        .sum();
    assert!((res.gamma - transmon_only).abs() < 1e-12 * g_white);
}
