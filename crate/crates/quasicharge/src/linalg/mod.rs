//! Dense and sparse complex matrices, a Hermitian eigensolver, propagators
//! for `e^{-iHt}v` and a fixed-step integrator for the dephasing master
//! equation.

mod dense;
mod eigh;
mod expm;
mod lindblad;
mod sparse;

use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

pub use dense::{DenseHermitian, DenseMatrix};
pub use eigh::{eigh, eigh_tridiagonal, EigenDecomposition};
pub use expm::{
    expmv, expmv_dense, expmv_krylov, DensePropagator, HermitianRef, KrylovOptions, Operator,
};
pub use lindblad::{liouvillian_norm_bound, rk4_lindblad, rk4_lindblad_observe, Rk4Options};
pub use sparse::{SparseHermitian, SparseMatrix};

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    NotHermitian { max_asymmetry: f64 },
    DimensionMismatch { expected: usize, found: usize },
    Empty,
    ZeroVector,
    KrylovStalled { residual: f64, subspace: usize },
    NonPhysicalState { reason: &'static str, value: f64 },
    NegativeRate(f64),
    DuplicateEntry { row: usize, col: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotHermitian { max_asymmetry } => {
                write!(f, "matrix is not Hermitian (max |A_ij - conj A_ji| = {max_asymmetry:e})")
            }
            Self::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Self::Empty => f.write_str("matrix has zero dimension"),
            Self::ZeroVector => f.write_str("input vector has zero norm"),
            Self::KrylovStalled { residual, subspace } => write!(
                f,
                "Krylov propagation did not converge with subspace {subspace} (residual {residual:e})"
            ),
            Self::NonPhysicalState { reason, value } => {
                write!(f, "initial density matrix rejected: {reason} ({value:e})")
            }
            Self::NegativeRate(a) => write!(f, "noise strength must be non-negative, got {a}"),
            Self::DuplicateEntry { row, col } => write!(f, "entry ({row}, {col}) given twice"),
        }
    }
}

impl core::error::Error for LinalgError {}

/// Euclidean norm.
pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨a|b⟩`, conjugating the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
