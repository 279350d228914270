//! Golden-rule leakage out of the qubit subspace: per-chain BdG
//! quasiparticles, junction coefficients and the rate sum over transmon
//! final states.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{eigh, DenseHermitian, DenseMatrix, LinalgError};
use crate::model::{ChainParams, ModelError, TransmonEigenbasis};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum LeakageError {
    Model(ModelError),
    Linalg(LinalgError),
    /// `|μ| ≥ 2t`: no Majorana zero modes.
    TrivialPhase {
        mu: f64,
        t_hop: f64,
    },
    LengthMismatch {
        left: usize,
        right: usize,
    },
    InvalidSpectrum(&'static str),
    BadInitialState(usize),
}

impl fmt::Display for LeakageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Model(e) => write!(f, "{e}"),
            Self::Linalg(e) => write!(f, "{e}"),
            Self::TrivialPhase { mu, t_hop } => {
                write!(f, "chain with mu = {mu}, t = {t_hop} is not topological")
            }
            Self::LengthMismatch { left, right } => {
                write!(f, "chain lengths differ: left {left}, right {right}")
            }
            Self::InvalidSpectrum(why) => write!(f, "invalid noise spectrum: {why}"),
            Self::BadInitialState(i) => write!(f, "initial transmon state must be 0 or 1, got {i}"),
        }
    }
}

impl core::error::Error for LeakageError {}

impl From<ModelError> for LeakageError {
    fn from(e: ModelError) -> Self {
        Self::Model(e)
    }
}

impl From<LinalgError> for LeakageError {
    fn from(e: LinalgError) -> Self {
        Self::Linalg(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Grounded chain; its last site faces the junction.
    Left,
    /// Island chain; its first site faces the junction.
    Right,
}

impl Side {
    fn junction_site(self, length: usize) -> usize {
        match self {
            Self::Left => length - 1,
            Self::Right => 0,
        }
    }
}

/// `[[A, B], [-B*, -A*]]` for `H = Σ -μ n_j - t(c_j†c_{j+1} + h.c.)
/// + |Δ|(c_j c_{j+1} + h.c.)`, so that `H = ½ Ψ† H_BdG Ψ + ½ Tr A` with
/// `Ψ = (c, c†)`.
pub fn bdg_matrix(cp: &ChainParams) -> DenseMatrix {
    let l = cp.length;
    DenseMatrix::from_fn(2 * l, 2 * l, |r, c| {
        let (br, bc) = (r / l, c / l);
        let (i, j) = (r % l, c % l);
        let a = if i == j {
            -cp.mu
        } else if i.abs_diff(j) == 1 {
            -cp.t_hop
        } else {
            0.0
        };
        let b = if i == j + 1 {
            cp.delta_abs
        } else if j == i + 1 {
            -cp.delta_abs
        } else {
            0.0
        };
        let v = match (br, bc) {
            (0, 0) => a,
            (0, 1) => b,
            (1, 0) => -b,
            _ => -a,
        };
        C64::new(v, 0.0)
    })
}

/// Quasiparticles `d_j = Σ_x (u_{xj}* c_x + v_{xj}* c_x†)` of one chain.
///
/// For the island chain `u, v` are `α, ψ`; for the grounded chain `β, φ`.
/// Column 0 is the zero mode, arranged so that `(-d_0 + d_0†)` on the island
/// and `(f_0 + f_0†)` on the grounded chain are the Majoranas localized at
/// the junction.
#[derive(Debug, Clone, PartialEq)]
pub struct BdgSolution {
    pub side: Side,
    pub energies: Vec<f64>,
    pub u: DenseMatrix,
    pub v: DenseMatrix,
    /// Trace of the normal block; the many-body constant is `(Tr A - Σ ε)/2`.
    pub trace_a: f64,
    /// The two eigenvalues closest to zero were treated as one degenerate pair.
    pub degenerate_zero_mode: bool,
}

impl BdgSolution {
    pub fn length(&self) -> usize {
        self.energies.len()
    }

    /// `[[u, v*], [v, u*]]`.
    pub fn unitary(&self) -> DenseMatrix {
        let l = self.length();
        DenseMatrix::from_fn(2 * l, 2 * l, |r, c| {
            let (i, j) = (r % l, c % l);
            match (r / l, c / l) {
                (0, 0) => self.u[(i, j)],
                (0, 1) => self.v[(i, j)].conj(),
                (1, 0) => self.v[(i, j)],
                _ => self.u[(i, j)].conj(),
            }
        })
    }

    pub fn unitarity_error(&self) -> f64 {
        let w = self.unitary();
        w.adjoint()
            .matmul(&w)
            .sub(&DenseMatrix::identity(w.rows()))
            .max_abs()
    }

    /// `Σ_j n_j ε_j + (Tr A - Σ_j ε_j)/2` over all occupations, ascending.
    pub fn many_body_spectrum(&self) -> Vec<f64> {
        let l = self.length();
        let offset = (self.trace_a - self.energies.iter().sum::<f64>()) / 2.0;
        let mut out: Vec<f64> = (0..1usize << l)
            .map(|mask| {
                offset
                    + (0..l)
                        .filter(|j| mask >> j & 1 == 1)
                        .map(|j| self.energies[j])
                        .sum::<f64>()
            })
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }
}

/// Particle-hole partner `(u, v) ↦ (v*, u*)`.
fn conjugate(w: &[C64], l: usize) -> Vec<C64> {
    w[l..].iter().chain(&w[..l]).map(|z| z.conj()).collect()
}

fn scaled(a: &[C64], s: C64) -> Vec<C64> {
    a.iter().map(|z| z * s).collect()
}

fn combine(a: &[C64], ca: f64, b: &[C64], cb: f64) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x * ca + y * cb).collect()
}

fn normalized(mut v: Vec<C64>) -> Option<Vec<C64>> {
    let n = crate::linalg::norm(&v);
    if n < 1e-6 {
        return None;
    }
    v.iter_mut().for_each(|z| *z /= n);
    Some(v)
}

/// Diagonalizes one chain's BdG matrix and fixes the zero-mode convention.
pub fn bdg_solve(cp: &ChainParams, side: Side) -> Result<BdgSolution, LeakageError> {
    let l = cp.length;
    let h = DenseHermitian::new(bdg_matrix(cp))?;
    let eig = eigh(&h);
    let col = |k: usize| eig.eigenvectors.column(k);
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let degenerate = eig.eigenvalues[l] - eig.eigenvalues[l - 1] <= 1e-9 * scale;

    // Two orthonormal self-conjugate (Majorana) vectors spanning the zero mode.
    let (m1, m2) = if degenerate {
        let mut ms: Vec<Vec<C64>> = Vec::new();
        for k in [l - 1, l] {
            let e = col(k);
            let ce = conjugate(&e, l);
            let plus: Vec<C64> = e.iter().zip(&ce).map(|(a, b)| a + b).collect();
            let minus: Vec<C64> = e.iter().zip(&ce).map(|(a, b)| (a - b) * C64::i()).collect();
            for mut cand in [plus, minus] {
                for m in &ms {
                    let proj = crate::linalg::inner(m, &cand).re;
                    cand.iter_mut().zip(m).for_each(|(c, x)| *c -= x * proj);
                }
                if let Some(v) = normalized(cand) {
                    if ms.len() < 2 {
                        ms.push(v);
                    }
                }
            }
        }
        let m2 = ms.pop().expect("two Majorana vectors");
        (ms.pop().expect("two Majorana vectors"), m2)
    } else {
        let wp = col(l);
        let cw = conjugate(&wp, l);
        let s = 1.0 / 2.0.sqrt();
        let m1: Vec<C64> = wp.iter().zip(&cw).map(|(a, b)| (a + b) * s).collect();
        let m2: Vec<C64> = wp
            .iter()
            .zip(&cw)
            .map(|(a, b)| (a - b) * C64::i() * s)
            .collect();
        (m1, m2)
    };

    let x = side.junction_site(l);
    let s = 1.0 / 2.0.sqrt();
    let zero = match side {
        Side::Right => {
            // d_0 = (γ_end + iγ_junction)/√2 with γ_junction maximal at x.
            let (p, q) = (m2[x], m1[x]);
            let chi = 0.5 * (-2.0 * (p * q.conj()).re).atan2(p.norm_sqr() - q.norm_sqr());
            let (c, sn) = (chi.cos(), chi.sin());
            let mut end = combine(&m1, c, &m2, sn);
            let mut junction = combine(&m2, c, &m1, -sn);
            if junction[x].re < 0.0 {
                junction = scaled(&junction, C64::new(-1.0, 0.0));
                end = scaled(&end, C64::new(-1.0, 0.0));
            }
            if degenerate {
                end = scaled(&end, C64::new(-1.0, 0.0));
            }
            end.iter()
                .zip(&junction)
                .map(|(b, a)| (b - a * C64::i()) * s)
                .collect::<Vec<_>>()
        }
        Side::Left => {
            // f_0 = (γ_junction + iγ_end)/√2.
            let (p, q) = (m1[x], m2[x]);
            let chi = 0.5 * (2.0 * (p * q.conj()).re).atan2(p.norm_sqr() - q.norm_sqr());
            let (c, sn) = (chi.cos(), chi.sin());
            let mut junction = combine(&m1, c, &m2, sn);
            let mut end = combine(&m2, c, &m1, -sn);
            if junction[x].im > 0.0 {
                junction = scaled(&junction, C64::new(-1.0, 0.0));
                end = scaled(&end, C64::new(-1.0, 0.0));
            }
            junction
                .iter()
                .zip(&end)
                .map(|(a, d)| (a - d * C64::i()) * s)
                .collect::<Vec<_>>()
        }
    };

    let mut energies = eig.eigenvalues[l..].to_vec();
    energies[0] = if degenerate { 0.0 } else { energies[0] };
    let columns: Vec<Vec<C64>> = (0..l)
        .map(|j| if j == 0 { zero.clone() } else { col(l + j) })
        .collect();
    let u = DenseMatrix::from_fn(l, l, |r, c| columns[c][r]);
    let v = DenseMatrix::from_fn(l, l, |r, c| columns[c][l + r]);
    Ok(BdgSolution {
        side,
        energies,
        u,
        v,
        trace_a: -cp.mu * l as f64,
        degenerate_zero_mode: degenerate,
    })
}

/// Junction coefficients: `A_nm` multiplies `(e^{iφ/2})_{if}` and `B_nm`
/// multiplies `(e^{-iφ/2})_{if}` in `⟨i|e^{-iφ/2} b_L† a_1 + h.c.|f; n, m⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbTables {
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    /// Quasiparticle energies of the island chain, `ε_n`.
    pub right_energies: Vec<f64>,
    /// Quasiparticle energies of the grounded chain, `ε'_m`.
    pub left_energies: Vec<f64>,
}

impl AbTables {
    pub fn length(&self) -> usize {
        self.right_energies.len()
    }
}

pub fn coefficients_ab(left: &BdgSolution, right: &BdgSolution) -> Result<AbTables, LeakageError> {
    let l = right.length();
    if left.length() != l {
        return Err(LeakageError::LengthMismatch {
            left: left.length(),
            right: l,
        });
    }
    let alpha = |n: usize| right.u[(0, n)];
    let psi = |n: usize| right.v[(0, n)];
    let beta = |m: usize| left.u[(l - 1, m)];
    let phi = |m: usize| left.v[(l - 1, m)];
    let half_i = C64::new(0.0, 0.5);
    let a = DenseMatrix::from_fn(l, l, |n, m| match (n, m) {
        (0, 0) => -0.25 * (psi(0) - alpha(0).conj()) * (phi(0).conj() + beta(0)),
        (0, _) => half_i * (psi(0) - alpha(0).conj()) * phi(m).conj(),
        (_, 0) => half_i * (phi(0).conj() + beta(0)) * alpha(n).conj(),
        _ => alpha(n).conj() * phi(m).conj(),
    });
    let b = DenseMatrix::from_fn(l, l, |n, m| match (n, m) {
        (0, 0) => -0.25 * (psi(0).conj() - alpha(0)) * (phi(0) + beta(0).conj()),
        (0, _) => half_i * (psi(0).conj() - alpha(0)) * beta(m).conj(),
        (_, 0) => -half_i * (phi(0) + beta(0).conj()) * psi(n).conj(),
        _ => -beta(m).conj() * psi(n).conj(),
    });
    Ok(AbTables {
        a,
        b,
        right_energies: right.energies.clone(),
        left_energies: left.energies.clone(),
    })
}

/// Power spectrum `S(ω)` of the tunneling-amplitude noise, in μeV⁻¹.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpectrum {
    White {
        level: f64,
    },
    /// Linear interpolation between samples, constant beyond the ends.
    Tabulated {
        omega: Vec<f64>,
        s: Vec<f64>,
    },
}

impl NoiseSpectrum {
    /// White noise with the master-equation rate `α`, `S = α/2π`.
    pub fn white_from_alpha(alpha: f64) -> Result<Self, LeakageError> {
        Self::white(alpha / (2.0 * PI))
    }

    pub fn white(level: f64) -> Result<Self, LeakageError> {
        if !(level >= 0.0) || !level.is_finite() {
            return Err(LeakageError::InvalidSpectrum(
                "level must be finite and non-negative",
            ));
        }
        Ok(Self::White { level })
    }

    pub fn tabulated(omega: Vec<f64>, s: Vec<f64>) -> Result<Self, LeakageError> {
        if omega.is_empty() || omega.len() != s.len() {
            return Err(LeakageError::InvalidSpectrum(
                "need matching, non-empty samples",
            ));
        }
        if omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(LeakageError::InvalidSpectrum(
                "frequencies must be strictly ascending",
            ));
        }
        if s.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(LeakageError::InvalidSpectrum(
                "S must be finite and non-negative",
            ));
        }
        Ok(Self::Tabulated { omega, s })
    }

    pub fn at(&self, omega: f64) -> f64 {
        match self {
            Self::White { level } => *level,
            Self::Tabulated { omega: w, s } => {
                let k = w.partition_point(|&x| x <= omega);
                if k == 0 {
                    s[0]
                } else if k == w.len() {
                    s[s.len() - 1]
                } else {
                    let f = (omega - w[k - 1]) / (w[k] - w[k - 1]);
                    s[k - 1] + f * (s[k] - s[k - 1])
                }
            }
        }
    }

    /// Same spectrum multiplied by `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            Self::White { level } => Self::White { level: level * c },
            Self::Tabulated { omega, s } => Self::Tabulated {
                omega: omega.clone(),
                s: s.iter().map(|x| x * c).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    /// Transmon label of the final state.
    pub f: usize,
    pub n: usize,
    pub m: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeakageResult {
    pub length: usize,
    /// Total rate in μeV/ħ.
    pub gamma: f64,
    pub channels: Vec<Channel>,
    pub f_max: usize,
    /// Contribution of the last transmon shell relative to the total.
    pub residual: f64,
    pub converged: bool,
}

impl LeakageResult {
    pub fn gamma_per_ns(&self) -> f64 {
        self.gamma / crate::HBAR_UEV_NS
    }
}

pub const DEFAULT_F_MAX: usize = 12;
const SHELL_TOLERANCE: f64 = 1e-6;

/// Golden-rule rate out of `|ψ̃_i⟩|Ω⟩`, summed over transmon final states
/// with label up to `f_max`. The sum is extended two labels at a time until
/// the last shell contributes at most `1e-6` of the total or the transmon
/// basis runs out. Final states `|ψ̃_{0,1}⟩|Ω⟩` lie inside the qubit subspace
/// and are excluded.
pub fn golden_rule_rate(
    basis: &TransmonEigenbasis,
    ab: &AbTables,
    spectrum: &NoiseSpectrum,
    i: usize,
    f_max: usize,
) -> Result<LeakageResult, LeakageError> {
    if i > 1 {
        return Err(LeakageError::BadInitialState(i));
    }
    let l = ab.length();
    let labels = basis.labels();
    let top = labels.last().copied().unwrap_or(0);
    let e_i = basis.energy(i);
    let shell = |f: usize| -> Vec<Channel> {
        let mut out = Vec::new();
        if basis.state(f).is_none() {
            return out;
        }
        let ep = basis.shift_element(i, f, 1);
        let em = basis.shift_element(i, f, -1);
        if ep == 0.0 && em == 0.0 {
            return out;
        }
        for n in 0..l {
            for m in 0..l {
                if n == 0 && m == 0 && f <= 1 {
                    continue;
                }
                let amp = ab.a[(n, m)] * ep + ab.b[(n, m)] * em;
                let de = basis.energy(f) + ab.right_energies[n] + ab.left_energies[m] - e_i;
                let rate = 2.0 * PI * amp.norm_sqr() * spectrum.at(de);
                out.push(Channel { f, n, m, rate });
            }
        }
        out
    };

    let mut channels = Vec::new();
    let mut f_used = f_max.max(4).min(top);
    for f in 0..=f_used {
        channels.extend(shell(f));
    }
    let shell_rate = |ch: &[Channel], f: usize| -> f64 {
        ch.iter()
            .filter(|c| c.f + 1 >= f && c.f <= f)
            .map(|c| c.rate)
            .sum()
    };
    loop {
        let total: f64 = channels.iter().map(|c| c.rate).sum();
        let residual = if total > 0.0 {
            shell_rate(&channels, f_used) / total
        } else {
            0.0
        };
        if residual <= SHELL_TOLERANCE || f_used >= top {
            return Ok(LeakageResult {
                length: l,
                gamma: total,
                channels,
                f_max: f_used,
                residual,
                converged: residual <= SHELL_TOLERANCE,
            });
        }
        for f in f_used + 1..=(f_used + 2).min(top) {
            channels.extend(shell(f));
        }
        f_used = (f_used + 2).min(top);
    }
}

/// One point of a leakage scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub mu: f64,
    pub w_f: f64,
    pub length: usize,
    pub gamma: f64,
    pub f_max: usize,
    pub residual: f64,
    pub converged: bool,
    /// Away from the sweet spot the end zero modes reach the junction for
    /// short chains and the result should not be trusted below `L = 5`.
    pub untrusted: bool,
}

/// Chain with `t = |Δ| = w_F` and chemical potential `μ`, checked to be
/// topological.
pub fn scan_chain(mu: f64, w_f: f64, length: usize) -> Result<ChainParams, LeakageError> {
    let cp = ChainParams::new(mu, w_f, w_f, length)?;
    if !cp.is_topological() {
        return Err(LeakageError::TrivialPhase { mu, t_hop: w_f });
    }
    Ok(cp)
}

/// `Γ_0` for a single chain setting; both chains share `cp`.
pub fn leakage_point(
    basis: &TransmonEigenbasis,
    cp: &ChainParams,
    spectrum: &NoiseSpectrum,
    f_max: usize,
) -> Result<ScanRow, LeakageError> {
    if !cp.is_topological() {
        return Err(LeakageError::TrivialPhase {
            mu: cp.mu,
            t_hop: cp.t_hop,
        });
    }
    let ab = coefficients_ab(&bdg_solve(cp, Side::Left)?, &bdg_solve(cp, Side::Right)?)?;
    let r = golden_rule_rate(basis, &ab, spectrum, 0, f_max)?;
    Ok(ScanRow {
        mu: cp.mu,
        w_f: cp.t_hop,
        length: cp.length,
        gamma: r.gamma,
        f_max: r.f_max,
        residual: r.residual,
        converged: r.converged,
        untrusted: !cp.is_sweet_spot() && cp.length < 5,
    })
}

/// `Γ_0(L)` for every `(μ, w_F)` and every `L`, row-major in that order.
pub fn leakage_scan(
    basis: &TransmonEigenbasis,
    detunings: &[(f64, f64)],
    lengths: &[usize],
    spectrum: &NoiseSpectrum,
) -> Result<Vec<ScanRow>, LeakageError> {
    let mut rows = Vec::with_capacity(detunings.len() * lengths.len());
    for &(mu, w_f) in detunings {
        for &l in lengths {
            let cp = scan_chain(mu, w_f, l)?;
            rows.push(leakage_point(basis, &cp, spectrum, DEFAULT_F_MAX)?);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::prepare_initial;
    use crate::hilbert::ChargeGrid;
    use crate::linalg::inner;
    use crate::model::{
        build_kitaev_fermionic, transmon_eigenbasis, tunneling_operator, PairingPhase,
        TransmonParams,
    };
    use alloc::vec;

    fn basis(cutoff: f64) -> TransmonEigenbasis {
        transmon_eigenbasis(
            &TransmonParams::reference(),
            &ChargeGrid::new(cutoff).unwrap(),
        )
        .unwrap()
    }

    fn gamma(b: &TransmonEigenbasis, cp: &ChainParams, alpha: f64) -> LeakageResult {
        let ab = coefficients_ab(
            &bdg_solve(cp, Side::Left).unwrap(),
            &bdg_solve(cp, Side::Right).unwrap(),
        )
        .unwrap();
        let s = NoiseSpectrum::white_from_alpha(alpha).unwrap();
        golden_rule_rate(b, &ab, &s, 0, DEFAULT_F_MAX).unwrap()
    }

    #[test]
    fn quasiparticle_phases_leave_rates_unchanged() {
        let cp = ChainParams::new(6.0, 12.0, 9.0, 4).unwrap();
        let (left, right) = (
            bdg_solve(&cp, Side::Left).unwrap(),
            bdg_solve(&cp, Side::Right).unwrap(),
        );
        let base = coefficients_ab(&left, &right).unwrap();
        let mut turned = right.clone();
        for n in 0..4 {
            let z = if n == 0 {
                C64::new(-1.0, 0.0)
            } else {
                C64::from_polar(1.0, 0.7 + n as f64)
            };
            for x in 0..4 {
                turned.u[(x, n)] *= z;
                turned.v[(x, n)] *= z;
            }
        }
        let mut flipped = left.clone();
        for x in 0..4 {
            flipped.u[(x, 0)] = -flipped.u[(x, 0)];
            flipped.v[(x, 0)] = -flipped.v[(x, 0)];
        }
        let other = coefficients_ab(&flipped, &turned).unwrap();
        for n in 0..4 {
            for m in 0..4 {
                assert!((base.a[(n, m)].norm() - other.a[(n, m)].norm()).abs() < 1e-13);
                assert!((base.b[(n, m)].norm() - other.b[(n, m)].norm()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn bdg_is_unitary_and_reproduces_many_body_spectrum() {
        for (mu, l) in [(0.0, 2), (0.0, 4), (5.0, 3), (-9.0, 5)] {
            let cp = ChainParams::new(mu, 12.0, 12.0, l).unwrap();
            for side in [Side::Left, Side::Right] {
                let sol = bdg_solve(&cp, side).unwrap();
                assert!(sol.unitarity_error() < 1e-10, "{mu} {l}");
                let h = build_kitaev_fermionic(&cp, PairingPhase::Fixed(C64::new(1.0, 0.0)))
                    .unwrap()
                    .to_dense();
                let exact = eigh(&DenseHermitian::new(h).unwrap()).eigenvalues;
                for (a, b) in exact.iter().zip(sol.many_body_spectrum()) {
                    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn sweet_spot_zero_mode_sits_on_the_junction_site() {
        let cp = ChainParams::sweet_spot(12.0, 4);
        let r = bdg_solve(&cp, Side::Right).unwrap();
        let l = bdg_solve(&cp, Side::Left).unwrap();
        assert!(r.degenerate_zero_mode && l.degenerate_zero_mode);
        // (-d_0 + d_0†) is localized on site 1, (f_0 + f_0†) on site L.
        let right_weight = (r.v[(0, 0)] - r.u[(0, 0)].conj()).norm();
        let left_weight = (l.v[(3, 0)].conj() + l.u[(3, 0)]).norm();
        assert!((right_weight - 1.0).abs() < 1e-10, "{right_weight}");
        assert!((left_weight - 1.0).abs() < 1e-10, "{left_weight}");
    }

    #[test]
    fn two_site_rate_matches_direct_projection() {
        let b = basis(8.5);
        let cp = ChainParams::sweet_spot(12.0, 2);
        let alpha = 0.03;
        let res = gamma(&b, &cp, alpha);
        let t = tunneling_operator(b.grid(), 2).unwrap();
        let psi0 = prepare_initial(&b, 0, 2).unwrap();
        let tpsi = t.matvec(&psi0);
        let mut leak = inner(&tpsi, &tpsi).re;
        for k in 0..2 {
            leak -= inner(&prepare_initial(&b, k, 2).unwrap(), &tpsi).norm_sqr();
        }
        assert!((res.gamma - alpha * leak).abs() < 1e-5 * alpha * leak);
        assert!(res.converged, "{} {}", res.residual, res.f_max);
        assert!(!gamma(&basis(2.5), &cp, alpha).converged);
    }

    #[test]
    fn rate_is_linear_in_alpha_and_flat_at_the_sweet_spot() {
        let b = basis(2.5);
        let g = |alpha: f64, l: usize| gamma(&b, &ChainParams::sweet_spot(12.0, l), alpha).gamma;
        let g1 = g(0.01, 2);
        assert!((g(0.04, 2) / g1 - 4.0).abs() < 1e-10);
        for l in 3..7 {
            assert!((g(0.01, l) - g1).abs() < 1e-9 * g1);
        }
    }

    #[test]
    fn trivial_phase_is_rejected() {
        assert!(matches!(
            scan_chain(25.0, 12.0, 4),
            Err(LeakageError::TrivialPhase { .. })
        ));
        let b = basis(2.5);
        let s = NoiseSpectrum::white(1.0).unwrap();
        assert!(leakage_scan(&b, &[(24.0, 12.0)], &[3], &s).is_err());
    }

    #[test]
    fn detuned_short_chains_are_flagged() {
        let b = basis(2.5);
        let s = NoiseSpectrum::white_from_alpha(0.03).unwrap();
        let rows = leakage_scan(&b, &[(0.0, 12.0), (8.0, 12.0)], &[3, 6], &s).unwrap();
        let flags: Vec<bool> = rows.iter().map(|r| r.untrusted).collect();
        assert_eq!(flags, [false, false, true, false]);
    }

    #[test]
    fn tabulated_spectrum_interpolates() {
        let s = NoiseSpectrum::tabulated(vec![0.0, 1.0, 3.0], vec![1.0, 3.0, 7.0]).unwrap();
        assert_eq!(s.at(-1.0), 1.0);
        assert_eq!(s.at(0.5), 2.0);
        assert_eq!(s.at(2.0), 5.0);
        assert_eq!(s.at(9.0), 7.0);
        assert!(NoiseSpectrum::tabulated(vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(NoiseSpectrum::tabulated(vec![0.0], vec![-1.0]).is_err());
    }

    #[test]
    fn initial_state_must_be_in_the_qubit() {
        let b = basis(2.5);
        let cp = ChainParams::sweet_spot(12.0, 2);
        let ab = coefficients_ab(
            &bdg_solve(&cp, Side::Left).unwrap(),
            &bdg_solve(&cp, Side::Right).unwrap(),
        )
        .unwrap();
        let s = NoiseSpectrum::white(1.0).unwrap();
        assert!(golden_rule_rate(&b, &ab, &s, 2, 12).is_err());
    }
}
