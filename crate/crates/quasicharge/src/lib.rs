//! Transmon quasicharge qubits coupled to Kitaev-chain junctions.
//!
//! Energies are in μeV and times in ħ/μeV throughout; [`HBAR_UEV_NS`] converts
//! to nanoseconds.

#![no_std]

extern crate alloc;

pub mod dynamics;
pub mod hilbert;
pub mod leakage;
pub mod linalg;
pub mod model;

pub use num_complex::Complex64 as C64;

/// ħ in μeV·ns.
pub const HBAR_UEV_NS: f64 = 0.658_211_956_9;

/// Converts a time in ħ/μeV to nanoseconds.
pub fn to_ns(t: f64) -> f64 {
    t * HBAR_UEV_NS
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
