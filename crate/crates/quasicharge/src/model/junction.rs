use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::kitaev::kitaev_on_register;
use super::transmon::transmon_charge_operator;
use super::{
    transmon_eigenbasis, ChainParams, ChargeOffset, JunctionParams, ModelError, TransmonEigenbasis,
    TransmonParams, DENSE_LIMIT,
};
use crate::hilbert::{
    charge_shift, jw_annihilator, pauli, ChargeGrid, HilbertSpace, Pauli, SpinRegister,
};
use crate::linalg::{DenseHermitian, SparseMatrix};
use crate::C64;

/// `transmon ⊗ (left chain, right chain)` with `2L` Jordan-Wigner spins.
pub fn junction_space(grid: &ChargeGrid, length: usize) -> Result<HilbertSpace, ModelError> {
    Ok(HilbertSpace::single(*grid, SpinRegister::junction(length)?))
}

/// `e^{-iφ/2} b_L† a_1 + e^{iφ/2} a_1† b_L` on the junction space.
pub fn tunneling_operator(grid: &ChargeGrid, length: usize) -> Result<SparseMatrix, ModelError> {
    let reg = SpinRegister::junction(length)?;
    let b_last = jw_annihilator(&reg, length)?;
    let a_first = jw_annihilator(&reg, length + 1)?;
    let hop = b_last.adjoint().matmul(&a_first);
    let forward = charge_shift(grid, -1)?.kron(&hop);
    Ok(forward.add(&forward.adjoint()))
}

/// Total charge `Σ_j a_j† a_j` of the right (island) chain.
pub(crate) fn right_chain_charge(
    reg: &SpinRegister,
    length: usize,
) -> Result<SparseMatrix, ModelError> {
    let mut n = SparseMatrix::zeros(reg.dim(), reg.dim());
    for j in 1..=length {
        let a = jw_annihilator(reg, length + j)?;
        n = n.add(&a.adjoint().matmul(&a));
    }
    Ok(n)
}

pub(crate) fn mt_single_sparse(
    tp: &TransmonParams,
    cp: &ChainParams,
    jp: &JunctionParams,
    grid: &ChargeGrid,
    offset: ChargeOffset,
) -> Result<SparseMatrix, ModelError> {
    let l = cp.length;
    let reg = SpinRegister::junction(l)?;
    let dim = grid.len() * reg.dim();
    if dim > DENSE_LIMIT {
        return Err(ModelError::TooLarge {
            dim,
            limit: DENSE_LIMIT,
        });
    }
    let one = C64::new(1.0, 0.0);
    let chains =
        kitaev_on_register(cp, &reg, 1, one)?.add(&kitaev_on_register(cp, &reg, l + 1, one)?);
    let transmon = match offset {
        ChargeOffset::Omitted => {
            transmon_charge_operator(tp, grid, None)?.kron(&SparseMatrix::identity(reg.dim()))
        }
        ChargeOffset::Included => {
            transmon_charge_operator(tp, grid, Some(&right_chain_charge(&reg, l)?))?
        }
    };
    Ok(transmon
        .add(&SparseMatrix::identity(grid.len()).kron(&chains))
        .add(&tunneling_operator(grid, l)?.scale_real(-jp.w)))
}

/// Rotated-frame Majorana-transmon Hamiltonian
/// `H̃_T + H_K^l + H_K^r - w(e^{-iφ/2} b_L† a_1 + h.c.)` on
/// `transmon ⊗ 2^{2L}` spins, both chains with phase-free pairing.
pub fn build_mt_single(
    tp: &TransmonParams,
    cp: &ChainParams,
    jp: &JunctionParams,
    grid: &ChargeGrid,
    offset: ChargeOffset,
) -> Result<DenseHermitian, ModelError> {
    Ok(DenseHermitian::new(
        mt_single_sparse(tp, cp, jp, grid, offset)?.to_dense(),
    )?)
}

/// Sweet-spot two-site junction written directly in spin operators,
/// `H̃_T - w_F(σ₁ˣσ₂ˣ + σ₃ˣσ₄ˣ) + w(e^{iφ/2} σ₂⁺σ₃⁻ + h.c.)`, with
/// `σ⁺ = |1⟩⟨0|` filling a site.
pub fn build_mt_single_spin_form(
    tp: &TransmonParams,
    grid: &ChargeGrid,
    w_f: f64,
    w: f64,
) -> Result<DenseHermitian, ModelError> {
    let reg = SpinRegister::junction(2)?;
    let x = |s| pauli(&reg, s, Pauli::X);
    let chains = x(1)?
        .matmul(&x(2)?)
        .add(&x(3)?.matmul(&x(4)?))
        .scale_real(-w_f);
    let flip = pauli(&reg, 2, Pauli::Plus)?.matmul(&pauli(&reg, 3, Pauli::Minus)?);
    let tunnel = charge_shift(grid, 1)?.kron(&flip).scale_real(w);
    let h = transmon_charge_operator(tp, grid, None)?
        .kron(&SparseMatrix::identity(reg.dim()))
        .add(&SparseMatrix::identity(grid.len()).kron(&chains))
        .add(&tunnel)
        .add(&tunnel.adjoint());
    Ok(DenseHermitian::new(h.to_dense())?)
}

/// `|n⟩ ↦ |-n⟩`.
pub fn charge_reflection(grid: &ChargeGrid) -> SparseMatrix {
    let n = grid.len();
    SparseMatrix::from_triplets(n, n, (0..n).map(|k| (n - 1 - k, k, C64::new(1.0, 0.0))))
}

/// Single-qubit model with everything needed to simulate it.
#[derive(Debug, Clone)]
pub struct MtModel {
    pub transmon: TransmonParams,
    pub chain: ChainParams,
    pub junction: JunctionParams,
    pub grid: ChargeGrid,
    pub offset: ChargeOffset,
    pub space: HilbertSpace,
    pub basis: TransmonEigenbasis,
    pub hamiltonian: DenseHermitian,
    /// Tunneling operator with unit amplitude; the charge-noise coupling.
    pub noise: DenseHermitian,
}

impl MtModel {
    pub fn new(
        tp: TransmonParams,
        cp: ChainParams,
        jp: JunctionParams,
        grid: ChargeGrid,
        offset: ChargeOffset,
    ) -> Result<Self, ModelError> {
        Ok(Self {
            space: junction_space(&grid, cp.length)?,
            basis: transmon_eigenbasis(&tp, &grid)?,
            hamiltonian: build_mt_single(&tp, &cp, &jp, &grid, offset)?,
            noise: DenseHermitian::new(tunneling_operator(&grid, cp.length)?.to_dense())?,
            transmon: tp,
            chain: cp,
            junction: jp,
            grid,
            offset,
        })
    }

    /// Same device with tunneling amplitude `w`.
    pub fn with_w(&self, w: f64) -> Result<Self, ModelError> {
        let jp = self.junction.with_w(w);
        Ok(Self {
            hamiltonian: build_mt_single(
                &self.transmon,
                &self.chain,
                &jp,
                &self.grid,
                self.offset,
            )?,
            junction: jp,
            ..self.clone()
        })
    }
}

/// Junction-fermion branches `∓(w/2) cos(θ/2)` for occupied and empty
/// junction fermion, continued through their crossings.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionBranches {
    pub theta: Vec<f64>,
    pub occupied: Vec<f64>,
    pub empty: Vec<f64>,
}

impl JunctionBranches {
    /// Sorted spectrum at each `θ`, `(lower, upper)`.
    pub fn spectrum(&self) -> Vec<(f64, f64)> {
        self.occupied
            .iter()
            .zip(&self.empty)
            .map(|(&a, &b)| (a.min(b), a.max(b)))
            .collect()
    }
}

pub fn junction_effective_spectrum(w: f64, theta: &[f64]) -> JunctionBranches {
    let half = |t: f64| (w / 2.0) * (t / 2.0).cos();
    JunctionBranches {
        theta: theta.to_vec(),
        occupied: theta.iter().map(|&t| -half(t)).collect(),
        empty: theta.iter().map(|&t| half(t)).collect(),
    }
}
