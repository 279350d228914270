//! Hamiltonian builders: transmon, Kitaev chains, the single and two-qubit
//! Majorana-transmon models, their projected qubit models and the frame
//! change check.

mod frame;
mod junction;
mod kitaev;
mod params;
mod transmon;
mod two_qubit;

use core::fmt;

pub use frame::{verify_frame_transform, FrameReport};
pub use junction::{
    build_mt_single, build_mt_single_spin_form, charge_reflection, junction_effective_spectrum,
    junction_space, tunneling_operator, JunctionBranches, MtModel,
};
pub use kitaev::{build_kitaev_fermionic, kitaev_on_register, PairingPhase};
pub use params::{ChainParams, ChargeOffset, JunctionParams, TransmonParams, TwoQubitParams};
pub use transmon::{
    bloch_bands, build_transmon_charge, effective_single, transmon_charge_operator,
    transmon_eigenbasis, BandPoint, EffectiveModel, Sublattice, TransmonEigenbasis, TransmonState,
};
pub use two_qubit::{
    build_two_qubit, effective_two_qubit, two_qubit_space, EffectiveTwoQubit, TwoQubitLayout,
    TwoQubitModel,
};

use crate::hilbert::HilbertError;
use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    InvalidParameter { name: &'static str, value: f64 },
    TooLarge { dim: usize, limit: usize },
    Unsupported(&'static str),
    Hilbert(HilbertError),
    Linalg(LinalgError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidParameter { name, value } => {
                write!(f, "invalid parameter {name} = {value}")
            }
            Self::TooLarge { dim, limit } => {
                write!(f, "Hilbert space dimension {dim} exceeds limit {limit}")
            }
            Self::Unsupported(what) => write!(f, "unsupported: {what}"),
            Self::Hilbert(e) => write!(f, "{e}"),
            Self::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ModelError {}

impl From<HilbertError> for ModelError {
    fn from(e: HilbertError) -> Self {
        Self::Hilbert(e)
    }
}

impl From<LinalgError> for ModelError {
    fn from(e: LinalgError) -> Self {
        Self::Linalg(e)
    }
}

/// Largest dimension built as a dense matrix.
pub const DENSE_LIMIT: usize = 4096;
/// Largest dimension built as a sparse matrix.
pub const SPARSE_LIMIT: usize = 4_000_000;
