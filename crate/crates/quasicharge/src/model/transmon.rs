use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{ModelError, TransmonParams, DENSE_LIMIT};
use crate::hilbert::{charge_shift, ChargeGrid};
use crate::linalg::{eigh, DenseHermitian, DenseMatrix, SparseMatrix};
use crate::C64;

/// `E_C(n - n_g)² - (E_J/2)(e^{iφ} + e^{-iφ})` on the grid. With
/// `chain_charge = Some(N)` the result acts on `grid ⊗ chains` and the
/// diagonal becomes `E_C(n ⊗ 1 - 1 ⊗ N/2 - n_g)²`; `N` must be diagonal.
pub fn transmon_charge_operator(
    tp: &TransmonParams,
    grid: &ChargeGrid,
    chain_charge: Option<&SparseMatrix>,
) -> Result<SparseMatrix, ModelError> {
    let cos = charge_shift(grid, 2)?
        .add(&charge_shift(grid, -2)?)
        .scale_real(-tp.e_j / 2.0);
    let values = grid.values();
    match chain_charge {
        None => {
            let diag: Vec<f64> = values
                .iter()
                .map(|n| tp.e_c * (n - tp.n_g).powi(2))
                .collect();
            Ok(SparseMatrix::from_diagonal(&diag).add(&cos))
        }
        Some(nr) => {
            if !nr.is_diagonal() || nr.rows() != nr.cols() {
                return Err(ModelError::Unsupported(
                    "chain charge offset must be a diagonal operator",
                ));
            }
            let d = nr.rows();
            let chain: Vec<f64> = (0..d).map(|i| nr.get(i, i).re).collect();
            let mut diag = Vec::with_capacity(values.len() * d);
            for n in &values {
                for q in &chain {
                    diag.push(tp.e_c * (n - q / 2.0 - tp.n_g).powi(2));
                }
            }
            Ok(SparseMatrix::from_diagonal(&diag).add(&cos.kron(&SparseMatrix::identity(d))))
        }
    }
}

/// Dense form of [`transmon_charge_operator`].
pub fn build_transmon_charge(
    tp: &TransmonParams,
    grid: &ChargeGrid,
    chain_charge: Option<&SparseMatrix>,
) -> Result<DenseHermitian, ModelError> {
    let dim = grid.len() * chain_charge.map_or(1, |m| m.rows());
    if dim > DENSE_LIMIT {
        return Err(ModelError::TooLarge {
            dim,
            limit: DENSE_LIMIT,
        });
    }
    Ok(DenseHermitian::new(
        transmon_charge_operator(tp, grid, chain_charge)?.to_dense(),
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPoint {
    pub kappa: f64,
    pub e0: f64,
    pub e1: f64,
}

/// Lowest two bands of `E_C(n + κ)² - E_J cos φ` on integer charges
/// `-integer_cutoff..=integer_cutoff`.
pub fn bloch_bands(
    tp: &TransmonParams,
    kappas: &[f64],
    integer_cutoff: usize,
) -> Result<Vec<BandPoint>, ModelError> {
    if integer_cutoff < 10 {
        return Err(ModelError::InvalidParameter {
            name: "integer_cutoff",
            value: integer_cutoff as f64,
        });
    }
    let n = 2 * integer_cutoff + 1;
    kappas
        .iter()
        .map(|&kappa| {
            let h = DenseMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    let q = i as f64 - integer_cutoff as f64 + kappa;
                    C64::new(tp.e_c * q * q, 0.0)
                } else if i.abs_diff(j) == 1 {
                    C64::new(-tp.e_j / 2.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let ev = eigh(&DenseHermitian::new(h)?).eigenvalues;
            Ok(BandPoint {
                kappa,
                e0: ev[0],
                e1: ev[1],
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sublattice {
    /// Integer charges, periodic in φ.
    Integer,
    /// Half-integer charges, antiperiodic in φ.
    HalfInteger,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmonState {
    pub energy: f64,
    pub sublattice: Sublattice,
    /// Position within its sublattice, by energy.
    pub rank: usize,
    /// Real amplitudes on the full half-integer grid.
    pub coeffs: Vec<f64>,
}

/// Eigenstates of `E_C(n - n_g)² - E_J cos φ` on the half-integer grid.
/// Label `i` refers to sublattice state `i / 2`, integer for even `i` and
/// half-integer for odd `i`, so `ψ̃_0` and `ψ̃_1` are the two ground states.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmonEigenbasis {
    grid: ChargeGrid,
    integer: Vec<TransmonState>,
    half: Vec<TransmonState>,
}

/// Diagonalizes each charge sublattice separately; `cos φ` never couples them.
pub fn transmon_eigenbasis(
    tp: &TransmonParams,
    grid: &ChargeGrid,
) -> Result<TransmonEigenbasis, ModelError> {
    let full = transmon_charge_operator(tp, grid, None)?;
    let block = |sub: Sublattice| -> Result<Vec<TransmonState>, ModelError> {
        let idx: Vec<usize> = (0..grid.len())
            .filter(|&k| grid.is_integer(k) == (sub == Sublattice::Integer))
            .collect();
        let h = DenseMatrix::from_fn(idx.len(), idx.len(), |a, b| full.get(idx[a], idx[b]));
        let ed = eigh(&DenseHermitian::new(h)?);
        Ok((0..idx.len())
            .map(|r| {
                let mut coeffs = vec![0.0; grid.len()];
                for (a, &k) in idx.iter().enumerate() {
                    coeffs[k] = ed.eigenvectors[(a, r)].re;
                }
                TransmonState {
                    energy: ed.eigenvalues[r],
                    sublattice: sub,
                    rank: r,
                    coeffs,
                }
            })
            .collect())
    };
    Ok(TransmonEigenbasis {
        grid: *grid,
        integer: block(Sublattice::Integer)?,
        half: block(Sublattice::HalfInteger)?,
    })
}

impl TransmonEigenbasis {
    pub fn grid(&self) -> &ChargeGrid {
        &self.grid
    }

    pub fn state(&self, label: usize) -> Option<&TransmonState> {
        if label.is_multiple_of(2) {
            self.integer.get(label / 2)
        } else {
            self.half.get(label / 2)
        }
    }

    /// Every valid label, ascending.
    pub fn labels(&self) -> Vec<usize> {
        let top = 2 * self.integer.len().max(self.half.len());
        (0..top).filter(|&i| self.state(i).is_some()).collect()
    }

    pub fn energy(&self, label: usize) -> f64 {
        self.expect(label).energy
    }

    fn expect(&self, label: usize) -> &TransmonState {
        self.state(label)
            .unwrap_or_else(|| panic!("no transmon state with label {label}"))
    }

    pub fn vector(&self, label: usize) -> Vec<C64> {
        self.expect(label)
            .coeffs
            .iter()
            .map(|&x| C64::new(x, 0.0))
            .collect()
    }

    pub fn sublattice_states(&self, sub: Sublattice) -> &[TransmonState] {
        match sub {
            Sublattice::Integer => &self.integer,
            Sublattice::HalfInteger => &self.half,
        }
    }

    /// `(E_0 - E_1)/2`.
    pub fn e01(&self) -> f64 {
        (self.energy(0) - self.energy(1)) / 2.0
    }

    /// `⟨ψ̃_i| S(halfsteps) |ψ̃_j⟩`.
    pub fn shift_element(&self, i: usize, j: usize, halfsteps: i32) -> f64 {
        let a = &self.expect(i).coeffs;
        let b = &self.expect(j).coeffs;
        let h = halfsteps as i64;
        (0..b.len() as i64)
            .filter_map(|k| {
                let to = k + h;
                (0..a.len() as i64)
                    .contains(&to)
                    .then(|| a[to as usize] * b[k as usize])
            })
            .sum()
    }

    /// `⟨ψ̃_i| cos(φ/2) |ψ̃_j⟩`.
    pub fn cos_half(&self, i: usize, j: usize) -> f64 {
        (self.shift_element(i, j, 1) + self.shift_element(i, j, -1)) / 2.0
    }

    /// `⟨ψ̃_1| cos(φ/2) |ψ̃_0⟩`.
    pub fn c10(&self) -> f64 {
        self.cos_half(1, 0)
    }
}

/// Projected qubit model `E_01 Z + (w/2) c₁₀ X` in the basis `(ψ̃_0, ψ̃_1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveModel {
    pub e01: f64,
    pub c10: f64,
    pub w: f64,
    pub hamiltonian: DenseMatrix,
}

impl EffectiveModel {
    pub fn new(e01: f64, c10: f64, w: f64) -> Self {
        let x = w / 2.0 * c10;
        let hamiltonian = DenseMatrix::from_real(2, 2, &[e01, x, x, -e01]);
        Self {
            e01,
            c10,
            w,
            hamiltonian,
        }
    }

    /// `2π / (w c₁₀)`, the population period when the Zeeman term is dropped.
    pub fn rabi_period(&self) -> f64 {
        2.0 * core::f64::consts::PI / (self.w * self.c10).abs()
    }
}

pub fn effective_single(
    tp: &TransmonParams,
    grid: &ChargeGrid,
    w: f64,
) -> Result<EffectiveModel, ModelError> {
    let basis = transmon_eigenbasis(tp, grid)?;
    Ok(EffectiveModel::new(basis.e01(), basis.c10(), w))
}
