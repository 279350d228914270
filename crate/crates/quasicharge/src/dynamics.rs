//! State preparation, unitary and noisy propagation, observables and the
//! single- and two-qubit gate protocols.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::hilbert::{
    partial_trace, partial_trace_pure, pauli, HilbertError, HilbertSpace, Pauli, SpinRegister,
};
use crate::linalg::{
    eigh, expmv_krylov, inner, norm, rk4_lindblad_observe, DenseHermitian, DenseMatrix,
    DensePropagator, HermitianRef, KrylovOptions, LinalgError, Rk4Options, SparseMatrix,
};
use crate::model::{EffectiveTwoQubit, ModelError, MtModel, TransmonEigenbasis, TwoQubitModel};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    Model(ModelError),
    Linalg(LinalgError),
    Hilbert(HilbertError),
    InvalidSchedule(&'static str),
    InvalidTimeGrid,
    Unsupported(&'static str),
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Model(e) => write!(f, "{e}"),
            Self::Linalg(e) => write!(f, "{e}"),
            Self::Hilbert(e) => write!(f, "{e}"),
            Self::InvalidSchedule(why) => write!(f, "invalid pulse schedule: {why}"),
            Self::InvalidTimeGrid => write!(f, "time grid must be finite and ascending"),
            Self::Unsupported(what) => write!(f, "unsupported: {what}"),
        }
    }
}

impl core::error::Error for DynamicsError {}

impl From<ModelError> for DynamicsError {
    fn from(e: ModelError) -> Self {
        Self::Model(e)
    }
}

impl From<LinalgError> for DynamicsError {
    fn from(e: LinalgError) -> Self {
        Self::Linalg(e)
    }
}

impl From<HilbertError> for DynamicsError {
    fn from(e: HilbertError) -> Self {
        Self::Hilbert(e)
    }
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// `|Ω⟩ = (|Φ⟩|Φ⟩ + |Ψ⟩|Ψ⟩)/√2` on four spins, with `|Φ⟩ = (|00⟩ + |11⟩)/√2`
/// and `|Ψ⟩ = (|01⟩ + |10⟩)/√2`.
pub fn chain_vacuum(length: usize) -> Result<Vec<C64>, DynamicsError> {
    if length != 2 {
        return Err(DynamicsError::Unsupported(
            "explicit chain vacuum needs L = 2",
        ));
    }
    let s = 1.0 / 2.0.sqrt();
    let phi = [real(s), ZERO, ZERO, real(s)];
    let psi = [ZERO, real(s), real(s), ZERO];
    Ok(kron_vec(&phi, &phi)
        .iter()
        .zip(kron_vec(&psi, &psi))
        .map(|(a, b)| (a + b) * s)
        .collect())
}

/// Junction-fermion occupation `(1 - σ_Lˣ σ_{L+1}ˣ)/2` on the `2L` spins.
pub fn junction_occupation(length: usize) -> Result<SparseMatrix, DynamicsError> {
    let reg = SpinRegister::junction(length)?;
    let xx = pauli(&reg, length, Pauli::X)?.matmul(&pauli(&reg, length + 1, Pauli::X)?);
    Ok(SparseMatrix::identity(reg.dim()).sub(&xx).scale_real(0.5))
}

/// `|ψ̃_which⟩ ⊗ |Ω⟩`.
pub fn prepare_initial(
    basis: &TransmonEigenbasis,
    which: usize,
    length: usize,
) -> Result<Vec<C64>, DynamicsError> {
    if which > 1 {
        return Err(DynamicsError::Unsupported(
            "initial transmon state must be 0 or 1",
        ));
    }
    Ok(kron_vec(&basis.vector(which), &chain_vacuum(length)?))
}

/// Populations of `|ψ̃_0 Ω⟩`, `|ψ̃_1 Ω⟩`, transmon purity and junction
/// occupation on the single-junction space.
#[derive(Debug, Clone)]
pub struct Observables {
    space: HilbertSpace,
    targets: [Vec<C64>; 2],
    occupation: SparseMatrix,
}

impl Observables {
    pub fn single(basis: &TransmonEigenbasis, length: usize) -> Result<Self, DynamicsError> {
        let space = HilbertSpace::single(*basis.grid(), SpinRegister::junction(length)?);
        let occ = junction_occupation(length)?;
        Ok(Self {
            targets: [
                prepare_initial(basis, 0, length)?,
                prepare_initial(basis, 1, length)?,
            ],
            occupation: SparseMatrix::identity(basis.grid().len()).kron(&occ),
            space,
        })
    }

    pub fn for_model(model: &MtModel) -> Result<Self, DynamicsError> {
        Self::single(&model.basis, model.chain.length)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn target(&self, i: usize) -> &[C64] {
        &self.targets[i]
    }

    fn record_pure(&self, trace: &mut SimulationTrace, psi: &[C64]) -> Result<(), DynamicsError> {
        for (i, p) in [&mut trace.p0, &mut trace.p1].into_iter().enumerate() {
            p.push(inner(&self.targets[i], psi).norm_sqr());
        }
        let rt = partial_trace_pure(psi, &self.space, 0)?;
        trace.purity.push(purity(&rt));
        trace.state_purity.push(norm(psi).powi(4));
        trace
            .occupation
            .push(inner(psi, &self.occupation.matvec(psi)).re);
        Ok(())
    }

    fn record_mixed(
        &self,
        trace: &mut SimulationTrace,
        rho: &DenseMatrix,
    ) -> Result<(), DynamicsError> {
        for (i, p) in [&mut trace.p0, &mut trace.p1].into_iter().enumerate() {
            p.push(rho.expectation(&self.targets[i], &self.targets[i]).re);
        }
        trace
            .purity
            .push(purity(&partial_trace(rho, &self.space, 0)?));
        trace.state_purity.push(purity(rho));
        let occ = self.occupation.mul_dense(rho);
        trace.occupation.push(occ.trace().re);
        Ok(())
    }
}

/// `Tr ρ²`.
pub fn purity(rho: &DenseMatrix) -> f64 {
    rho.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Observables sampled on a time grid. Times are in ħ/μeV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimulationTrace {
    pub times: Vec<f64>,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    /// Purity of the reduced transmon state.
    pub purity: Vec<f64>,
    /// `Tr ρ²` of the whole system.
    pub state_purity: Vec<f64>,
    /// Junction-fermion occupation `⟨g̃₀†g̃₀⟩`.
    pub occupation: Vec<f64>,
}

impl SimulationTrace {
    pub fn times_ns(&self) -> Vec<f64> {
        self.times.iter().map(|&t| crate::to_ns(t)).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `points` uniformly spaced times from `t0` to `t1` inclusive.
pub fn time_grid(t0: f64, t1: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..points)
            .map(|k| t0 + (t1 - t0) * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

fn check_grid(t_grid: &[f64]) -> Result<(), DynamicsError> {
    let finite = t_grid.iter().all(|t| t.is_finite());
    if !finite || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(DynamicsError::InvalidTimeGrid);
    }
    Ok(())
}

/// Unitary evolution of `state` sampled on `t_grid`, with `t_grid[0]` the
/// time at which `state` is given.
pub fn evolve_unitary<'a>(
    h: impl Into<HermitianRef<'a>>,
    obs: &Observables,
    state: &[C64],
    t_grid: &[f64],
) -> Result<SimulationTrace, DynamicsError> {
    check_grid(t_grid)?;
    let mut trace = SimulationTrace {
        times: t_grid.to_vec(),
        ..Default::default()
    };
    let Some(&t0) = t_grid.first() else {
        return Ok(trace);
    };
    match h.into() {
        HermitianRef::Dense(d) => {
            let prop = DensePropagator::new(d);
            for &t in t_grid {
                obs.record_pure(&mut trace, &prop.apply(state, t - t0)?)?;
            }
        }
        HermitianRef::Sparse(s) => {
            let mut psi = state.to_vec();
            let mut prev = t0;
            for &t in t_grid {
                psi = expmv_krylov(s, &psi, t - prev, &KrylovOptions::default())?;
                obs.record_pure(&mut trace, &psi)?;
                prev = t;
            }
        }
    }
    Ok(trace)
}

/// Master-equation evolution with the double-commutator dissipator
/// `-(α/2)[l, [l, ρ]]`.
pub fn evolve_noisy(
    h: &DenseHermitian,
    l: &DenseHermitian,
    alpha: f64,
    rho0: &DenseMatrix,
    t_grid: &[f64],
    obs: &Observables,
    opts: &Rk4Options,
) -> Result<SimulationTrace, DynamicsError> {
    check_grid(t_grid)?;
    let mut trace = SimulationTrace {
        times: t_grid.to_vec(),
        ..Default::default()
    };
    let mut failure = None;
    rk4_lindblad_observe(h, l, alpha, rho0, t_grid, opts, |_, rho| {
        if failure.is_none() {
            if let Err(e) = obs.record_mixed(&mut trace, rho) {
                failure = Some(e);
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(trace),
    }
}

/// RK4 step cap `min(0.02/‖H‖, t_gate/2000)`.
pub fn rk4_step_cap(h: &DenseHermitian, t_gate: f64) -> f64 {
    let by_norm = 0.02 / h.norm_bound().max(f64::MIN_POSITIVE);
    if t_gate > 0.0 {
        by_norm.min(t_gate / 2000.0)
    } else {
        by_norm
    }
}

/// Period of an oscillation that starts at a maximum: the first revival
/// after the first minimum, each located by a parabola through the
/// neighbouring samples.
pub fn oscillation_period(times: &[f64], signal: &[f64]) -> Option<f64> {
    let n = times.len().min(signal.len());
    let refine = |k: usize| -> f64 {
        let (y0, y1, y2) = (signal[k - 1], signal[k], signal[k + 1]);
        let denom = y0 - 2.0 * y1 + y2;
        let shift = if denom != 0.0 {
            0.5 * (y0 - y2) / denom
        } else {
            0.0
        };
        times[k] + shift.clamp(-1.0, 1.0) * (times[k + 1] - times[k - 1]) / 2.0
    };
    let min_k = (1..n.checked_sub(1)?)
        .find(|&k| signal[k] < signal[k - 1] && signal[k] <= signal[k + 1])?;
    let max_k =
        (min_k + 1..n - 1).find(|&k| signal[k] > signal[k - 1] && signal[k] >= signal[k + 1]);
    match max_k {
        Some(k) => Some(refine(k) - times[0]),
        None => Some(2.0 * (refine(min_k) - times[0])),
    }
}

/// Piecewise-constant tunneling amplitude. Outside the segments the
/// amplitude is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    segments: Vec<(f64, f64, f64)>,
}

impl PulseSchedule {
    /// Segments `(t_start, t_end, amplitude)`, ascending and non-overlapping,
    /// starting at or after zero.
    pub fn new(segments: Vec<(f64, f64, f64)>) -> Result<Self, DynamicsError> {
        let mut last = 0.0;
        for &(a, b, w) in &segments {
            if !(a.is_finite() && b.is_finite() && w.is_finite()) {
                return Err(DynamicsError::InvalidSchedule("non-finite value"));
            }
            if w < 0.0 {
                return Err(DynamicsError::InvalidSchedule("negative amplitude"));
            }
            if b < a {
                return Err(DynamicsError::InvalidSchedule(
                    "segment ends before it starts",
                ));
            }
            if a < last {
                return Err(DynamicsError::InvalidSchedule(
                    "segments overlap or are out of order",
                ));
            }
            last = b;
        }
        Ok(Self { segments })
    }

    pub fn constant(duration: f64, amplitude: f64) -> Result<Self, DynamicsError> {
        Self::new(vec![(0.0, duration, amplitude)])
    }

    pub fn segments(&self) -> &[(f64, f64, f64)] {
        &self.segments
    }

    pub fn duration(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.1)
    }

    /// `∫ w dt`.
    pub fn area(&self) -> f64 {
        self.segments.iter().map(|&(a, b, w)| (b - a) * w).sum()
    }

    /// Consecutive `(duration, amplitude)` pieces from `t = 0`, gaps included
    /// with zero amplitude.
    pub fn pieces(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut t = 0.0;
        for &(a, b, w) in &self.segments {
            if a > t {
                out.push((a - t, 0.0));
            }
            if b > a {
                out.push((b - a, w));
            }
            t = b;
        }
        out
    }
}

/// `⟨v_i|H|v_j⟩` for the two qubit states `v_0, v_1`.
pub fn projected_hamiltonian(h: &DenseHermitian, v: [&[C64]; 2]) -> DenseMatrix {
    let hv: [Vec<C64>; 2] = [h.matrix().matvec(v[0]), h.matrix().matvec(v[1])];
    DenseMatrix::from_fn(2, 2, |i, j| inner(v[i], &hv[j]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateOptions {
    /// Rerun with half the step and report the change in fidelity.
    pub check_convergence: bool,
    /// Replaces the default step cap.
    pub max_dt: Option<f64>,
    /// Transmon state the gate acts on.
    pub initial: usize,
}

impl Default for GateOptions {
    fn default() -> Self {
        Self {
            check_convergence: true,
            max_dt: None,
            initial: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateResult {
    /// `2|∫ x(t) dt|` for the projected transverse coupling `x`.
    pub target_angle: f64,
    /// `2 atan2(√P_1, √P_0)` of the final state.
    pub achieved_angle: f64,
    pub fidelity: f64,
    pub p0: f64,
    pub p1: f64,
    /// Whether the target keeps the `E_01 Z` term.
    pub zeeman_kept: bool,
    pub max_dt: f64,
    /// `|F(dt) - F(dt/2)|`, when checked.
    pub convergence: Option<f64>,
    pub final_state: DenseMatrix,
}

impl GateResult {
    pub fn converged(&self) -> bool {
        self.convergence.is_none_or(|d| d < 1e-5)
    }
}

fn expm_2x2(h: &DenseMatrix, v: [C64; 2], t: f64) -> Result<[C64; 2], DynamicsError> {
    let out = DensePropagator::new(&DenseHermitian::new(h.clone())?).apply(&v, t)?;
    Ok([out[0], out[1]])
}

/// R_X protocol on the full single-junction model: the tunneling amplitude
/// follows `schedule` while the state `|ψ̃_i Ω⟩⟨ψ̃_i Ω|` evolves under the
/// master equation. The target is the same schedule applied to the
/// projection of the full Hamiltonian onto `{|ψ̃_0 Ω⟩, |ψ̃_1 Ω⟩}`; its `Z`
/// part is dropped when `|2E_01| t_gate ≤ 1e-3`.
pub fn rx_gate(
    model: &MtModel,
    schedule: &PulseSchedule,
    alpha: f64,
    opts: &GateOptions,
) -> Result<GateResult, DynamicsError> {
    if alpha < 0.0 || alpha.is_nan() {
        return Err(DynamicsError::Linalg(LinalgError::NegativeRate(alpha)));
    }
    let obs = Observables::for_model(model)?;
    let pieces = schedule.pieces();
    let t_gate = schedule.duration();
    let zeeman_kept = (2.0 * model.basis.e01()).abs() * t_gate > 1e-3;

    let mut hams: Vec<(f64, DenseHermitian)> = Vec::new();
    for &(_, w) in &pieces {
        if !hams.iter().any(|(x, _)| *x == w) {
            hams.push((w, model.with_w(w)?.hamiltonian));
        }
    }
    let ham = |w: f64| &hams.iter().find(|(x, _)| *x == w).expect("cached").1;
    let max_dt = opts.max_dt.unwrap_or_else(|| {
        hams.iter()
            .map(|(_, h)| rk4_step_cap(h, t_gate))
            .fold(f64::INFINITY, f64::min)
    });

    let mut q = [ZERO, ZERO];
    q[opts.initial.min(1)] = real(1.0);
    let mut area = 0.0;
    for &(dt, w) in &pieces {
        let mut hp = projected_hamiltonian(ham(w), [obs.target(0), obs.target(1)]);
        let mean = (hp[(0, 0)] + hp[(1, 1)]) / 2.0;
        for k in 0..2 {
            let d = if zeeman_kept { hp[(k, k)] - mean } else { ZERO };
            hp.as_mut_slice()[3 * k] = d;
        }
        area += hp[(1, 0)].norm() * dt;
        q = expm_2x2(&hp, q, dt)?;
    }
    let target: Vec<C64> = obs
        .target(0)
        .iter()
        .zip(obs.target(1))
        .map(|(a, b)| q[0] * a + q[1] * b)
        .collect();

    let psi0 = obs.target(opts.initial.min(1));
    let rho0 = DenseMatrix::outer(psi0);
    let run = |cap: f64| -> Result<DenseMatrix, DynamicsError> {
        let mut rho = rho0.clone();
        let rk = Rk4Options {
            max_dt: Some(cap),
            ..Rk4Options::default()
        };
        for &(dt, w) in &pieces {
            let mut last = None;
            rk4_lindblad_observe(
                ham(w),
                &model.noise,
                alpha,
                &rho,
                &[0.0, dt],
                &rk,
                |i, r| {
                    if i == 1 {
                        last = Some(r.clone());
                    }
                },
            )?;
            rho = last.expect("final state");
        }
        Ok(rho)
    };
    let rho = run(max_dt)?;
    let fidelity = rho.expectation(&target, &target).re;
    let convergence = if opts.check_convergence {
        Some((run(max_dt / 2.0)?.expectation(&target, &target).re - fidelity).abs())
    } else {
        None
    };
    let p0 = rho.expectation(obs.target(0), obs.target(0)).re;
    let p1 = rho.expectation(obs.target(1), obs.target(1)).re;
    Ok(GateResult {
        target_angle: 2.0 * area,
        achieved_angle: 2.0 * p1.max(0.0).sqrt().atan2(p0.max(0.0).sqrt()),
        fidelity,
        p0,
        p1,
        zeeman_kept,
        max_dt,
        convergence,
        final_state: rho,
    })
}

/// `2|ad - bc|` for `a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩`.
pub fn concurrence_pure(psi: &[C64; 4]) -> f64 {
    2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm()
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &DenseMatrix) -> Result<f64, DynamicsError> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(DynamicsError::Linalg(LinalgError::DimensionMismatch {
            expected: 4,
            found: rho.rows(),
        }));
    }
    let rho = DenseHermitian::new(rho.clone())?;
    let yy = DenseMatrix::from_real(
        4,
        4,
        &[
            0.0, 0.0, 0.0, -1.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0,
        ],
    );
    let conj = DenseMatrix::from_fn(4, 4, |i, j| rho.matrix()[(i, j)].conj());
    let tilde = yy.matmul(&conj).matmul(&yy);
    let sqrt_rho = eigh(&rho).reconstruct_with(|l| real(l.max(0.0).sqrt()));
    let m = DenseHermitian::new(sqrt_rho.matmul(&tilde).matmul(&sqrt_rho))?;
    let mut lambda: Vec<f64> = eigh(&m)
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0))
}

/// `e^{-iθ X₁X₂}` with `θ = (c₂/2)∫ w12 dt` applied to `initial`; returns the
/// final state and its concurrence.
pub fn rxx_gate(
    effective: &EffectiveTwoQubit,
    schedule: &PulseSchedule,
    initial: &[C64; 4],
) -> ([C64; 4], f64) {
    let theta = effective.c2 / 2.0 * schedule.area();
    let (c, s) = (real(theta.cos()), C64::new(0.0, -theta.sin()));
    let out = [
        c * initial[0] + s * initial[3],
        c * initial[1] + s * initial[2],
        c * initial[2] + s * initial[1],
        c * initial[3] + s * initial[0],
    ];
    (out, concurrence_pure(&out))
}

/// `|ψ̃_i ψ̃_j⟩ ⊗ |Ω⟩|Ω⟩|Ω⟩` on the two-qubit space.
pub fn two_qubit_initial(
    b1: &TransmonEigenbasis,
    b2: &TransmonEigenbasis,
    i: usize,
    j: usize,
) -> Result<Vec<C64>, DynamicsError> {
    let omega = chain_vacuum(2)?;
    let chains = kron_vec(&kron_vec(&omega, &omega), &omega);
    Ok(kron_vec(&kron_vec(&b1.vector(i), &b2.vector(j)), &chains))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TransferTrace {
    pub times: Vec<f64>,
    pub p00: Vec<f64>,
    pub p11: Vec<f64>,
    pub norm: Vec<f64>,
}

/// Krylov evolution of `|ψ̃_0 ψ̃_0 ΩΩΩ⟩` under the full two-qubit model,
/// tracking the populations of `|ψ̃_0ψ̃_0 ΩΩΩ⟩` and `|ψ̃_1ψ̃_1 ΩΩΩ⟩`.
pub fn two_qubit_transfer(
    model: &TwoQubitModel,
    b1: &TransmonEigenbasis,
    b2: &TransmonEigenbasis,
    t_grid: &[f64],
) -> Result<TransferTrace, DynamicsError> {
    check_grid(t_grid)?;
    let v00 = two_qubit_initial(b1, b2, 0, 0)?;
    let v11 = two_qubit_initial(b1, b2, 1, 1)?;
    if v00.len() != model.hamiltonian.dim() {
        return Err(DynamicsError::Linalg(LinalgError::DimensionMismatch {
            expected: model.hamiltonian.dim(),
            found: v00.len(),
        }));
    }
    let mut out = TransferTrace {
        times: t_grid.to_vec(),
        ..Default::default()
    };
    let mut psi = v00.clone();
    let mut prev = t_grid.first().copied().unwrap_or(0.0);
    for &t in t_grid {
        psi = expmv_krylov(
            &model.hamiltonian,
            &psi,
            t - prev,
            &KrylovOptions::default(),
        )?;
        out.p00.push(inner(&v00, &psi).norm_sqr());
        out.p11.push(inner(&v11, &psi).norm_sqr());
        out.norm.push(norm(&psi));
        prev = t;
    }
    Ok(out)
}
