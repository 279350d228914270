mod common;

use quasicharge::dynamics::{
    concurrence, concurrence_pure, evolve_noisy, evolve_unitary, oscillation_period,
    prepare_initial, rx_gate, rxx_gate, time_grid, two_qubit_transfer, GateOptions, Observables,
    PulseSchedule,
};
use quasicharge::hilbert::ChargeGrid;
use quasicharge::leakage::{bdg_solve, coefficients_ab, golden_rule_rate, NoiseSpectrum, Side};
use quasicharge::linalg::{DenseMatrix, Rk4Options};
use quasicharge::model::{
    build_two_qubit, effective_single, effective_two_qubit, transmon_eigenbasis, ChainParams,
    ChargeOffset, JunctionParams, MtModel, TransmonParams, TwoQubitParams,
};
use quasicharge::C64;
use std::f64::consts::PI;

fn reference_model(cutoff: f64) -> MtModel {
    MtModel::new(
        TransmonParams::reference(),
        ChainParams::sweet_spot(12.0, 2),
        JunctionParams::reference(),
        ChargeGrid::new(cutoff).unwrap(),
        ChargeOffset::Omitted,
    )
    .unwrap()
}

#[test]
fn rabi_period_follows_projected_coupling() {
    let m = reference_model(2.5);
    let eff = effective_single(&m.transmon, &m.grid, 3.0).unwrap();
    let obs = Observables::for_model(&m).unwrap();
    let psi = prepare_initial(&m.basis, 0, 2).unwrap();
    let t = time_grid(0.0, 2.0 * eff.rabi_period(), 801);
    let tr = evolve_unitary(&m.hamiltonian, &obs, &psi, &t).unwrap();
    let period = oscillation_period(&tr.times, &tr.p0).unwrap();
    assert!((period / eff.rabi_period() - 1.0).abs() < 0.05);
    for k in 0..t.len() {
        assert!(tr.p0[k] + tr.p1[k] <= 1.0 + 1e-10);
    }
    let first_min = tr.p0.iter().cloned().fold(f64::MAX, f64::min);
    assert!(first_min < 0.05);
}

#[test]
fn short_time_leakage_matches_golden_rule() {
    let m = reference_model(1.5).with_w(0.0).unwrap();
    let alpha = 1e-3;
    let obs = Observables::for_model(&m).unwrap();
    let psi = prepare_initial(&m.basis, 0, 2).unwrap();
    let t = time_grid(0.0, 0.2, 3);
    let tr = evolve_noisy(
        &m.hamiltonian,
        &m.noise,
        alpha,
        &DenseMatrix::outer(&psi),
        &t,
        &obs,
        &Rk4Options::default(),
    )
    .unwrap();
    let rate = (1.0 - tr.p0[2] - tr.p1[2]) / t[2];
    let cp = m.chain;
    let ab = coefficients_ab(
        &bdg_solve(&cp, Side::Left).unwrap(),
        &bdg_solve(&cp, Side::Right).unwrap(),
    )
    .unwrap();
    let s = NoiseSpectrum::white_from_alpha(alpha).unwrap();
    let gamma = golden_rule_rate(&m.basis, &ab, &s, 0, 64).unwrap().gamma;
    assert!((rate / gamma - 1.0).abs() < 0.2, "{rate} vs {gamma}");
}

#[test]
fn noise_lowers_gate_fidelity() {
    let m = reference_model(1.5);
    let eff = effective_single(&m.transmon, &m.grid, 3.0).unwrap();
    let sched = PulseSchedule::constant(eff.rabi_period() / 4.0, 3.0).unwrap();
    let opts = GateOptions {
        check_convergence: false,
        ..GateOptions::default()
    };
    let f: Vec<f64> = [0.0, 0.01, 0.03]
        .iter()
        .map(|&a| rx_gate(&m, &sched, a, &opts).unwrap().fidelity)
        .collect();
    assert!(f[0] > f[1] && f[1] > f[2], "{f:?}");
    assert!(f[0] > 0.9);
}

#[test]
fn projected_xx_gate_entangles_maximally() {
    let tp = TransmonParams::reference();
    let g = ChargeGrid::new(2.5).unwrap();
    let eff =
        effective_two_qubit(&tp, &TwoQubitParams::new(0.0, 0.0, 3.0).unwrap(), (&g, &g)).unwrap();
    let duration = (PI / 4.0) / (eff.c2 / 2.0 * 3.0);
    let sched = PulseSchedule::constant(duration, 3.0).unwrap();
    let zero = C64::new(0.0, 0.0);
    let (out, c) = rxx_gate(&eff, &sched, &[C64::new(1.0, 0.0), zero, zero, zero]);
    assert!((c - 1.0).abs() < 1e-6);
    let rho = DenseMatrix::outer(&out);
    assert!((concurrence(&rho).unwrap() - 1.0).abs() < 1e-6);
    let (back, _) = rxx_gate(
        &eff,
        &PulseSchedule::constant(2.0 * duration, 3.0).unwrap(),
        &[C64::new(1.0, 0.0), zero, zero, zero],
    );
    assert!(concurrence_pure(&back) < 1e-9);
    assert!((back[3].norm() - 1.0).abs() < 1e-9);
}

#[test]
fn two_qubit_transfer_on_a_small_grid() {
    let tp = TransmonParams::new(0.05, 1.0, 0.0).unwrap();
    let g = ChargeGrid::new(0.5).unwrap();
    let tq = TwoQubitParams::new(0.0, 0.0, 3.0).unwrap();
    let cp = ChainParams::sweet_spot(12.0, 2);
    let model = build_two_qubit(&tp, &cp, &tq, (&g, &g), ChargeOffset::Omitted).unwrap();
    let b = transmon_eigenbasis(&tp, &g).unwrap();
    let t = time_grid(0.0, 1.0, 5);
    let tr = two_qubit_transfer(&model, &b, &b, &t).unwrap();
    assert!(tr.norm.iter().all(|n| (n - 1.0).abs() < 1e-9));
    assert!((tr.p00[0] - 1.0).abs() < 1e-12);
    assert!(tr.p11[4] > tr.p11[0]);
}
