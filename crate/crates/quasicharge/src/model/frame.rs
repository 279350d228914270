use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::junction::{mt_single_sparse, right_chain_charge};
use super::kitaev::{kitaev_on_register, kitaev_parts};
use super::transmon::transmon_charge_operator;
use super::{ChainParams, ChargeOffset, JunctionParams, ModelError, TransmonParams};
use crate::hilbert::{charge_shift, jw_annihilator, ChargeGrid, SpinRegister};
use crate::linalg::{eigh, DenseHermitian, DenseMatrix, SparseMatrix};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    /// `max |(Û H Û† - H̃)_{rc}|` over interior charges, divided by `max |H̃|`.
    pub interior_deviation: f64,
    pub interior_states: usize,
    pub norm: f64,
    /// Largest difference among the lowest four eigenvalues on the same grid.
    pub low_lying_deviation: f64,
    /// Largest entry of `Û H Û† - H̃` when the original frame is built on a
    /// grid wide enough to contain every preimage of the rotated grid.
    pub padded_matrix_deviation: f64,
    /// Largest eigenvalue difference for that consistent truncation.
    pub padded_spectral_deviation: f64,
}

/// Original-frame model: `E_C(n - n_g)² - E_J cos φ`, phase-free left chain,
/// right chain pairing `|Δ|(e^{iφ} a_j a_{j+1} + h.c.)`, phase-free tunneling.
fn original_frame(
    tp: &TransmonParams,
    cp: &ChainParams,
    jp: &JunctionParams,
    grid: &ChargeGrid,
) -> Result<SparseMatrix, ModelError> {
    let l = cp.length;
    let reg = SpinRegister::junction(l)?;
    let id_g = SparseMatrix::identity(grid.len());
    let left = kitaev_on_register(cp, &reg, 1, C64::new(1.0, 0.0))?;
    let right = kitaev_parts(cp, &reg, l + 1)?;
    let pairing = charge_shift(grid, 2)?
        .kron(&right.pair)
        .scale_real(cp.delta_abs);
    let hop = jw_annihilator(&reg, l)?
        .adjoint()
        .matmul(&jw_annihilator(&reg, l + 1)?);
    let tunnel = id_g.kron(&hop.add(&hop.adjoint())).scale_real(-jp.w);
    Ok(transmon_charge_operator(tp, grid, None)?
        .kron(&SparseMatrix::identity(reg.dim()))
        .add(&id_g.kron(&left.add(&right.normal)))
        .add(&pairing)
        .add(&pairing.adjoint())
        .add(&tunnel))
}

/// Checks that `Û = e^{iφ n^(r)/2}`, which shifts the transmon charge by half
/// the island-chain charge, maps the original-frame model onto the rotated
/// one with the charge offset included.
pub fn verify_frame_transform(
    tp: &TransmonParams,
    cp: &ChainParams,
    jp: &JunctionParams,
    grid: &ChargeGrid,
) -> Result<FrameReport, ModelError> {
    let l = cp.length;
    let reg = SpinRegister::junction(l)?;
    let ds = reg.dim();
    let nr = right_chain_charge(&reg, l)?;
    let chain_q: Vec<usize> = (0..ds).map(|s| nr.get(s, s).re.round() as usize).collect();

    let rotated = mt_single_sparse(tp, cp, jp, grid, ChargeOffset::Included)?.to_dense();
    let norm = rotated.max_abs();

    // Same-grid comparison on interior charges.
    let original = original_frame(tp, cp, jp, grid)?.to_dense();
    let g = grid.len();
    let preimage =
        |k: usize, s: usize| -> Option<usize> { k.checked_sub(chain_q[s]).map(|k0| k0 * ds + s) };
    let margin = l as f64 / 2.0 + 1.0;
    let interior: Vec<(usize, usize)> = (0..g)
        .flat_map(|k| (0..ds).map(move |s| (k, s)))
        .filter(|&(k, _)| grid.value(k).abs() <= grid.cutoff() - margin)
        .collect();
    let mut interior_deviation = 0.0f64;
    for &(k, s) in &interior {
        for &(k2, s2) in &interior {
            let (p, q) = (
                preimage(k, s).expect("interior preimage"),
                preimage(k2, s2).expect("interior preimage"),
            );
            let d = original[(p, q)] - rotated[(k * ds + s, k2 * ds + s2)];
            interior_deviation = interior_deviation.max(d.norm());
        }
    }

    let spec = |m: &DenseMatrix| {
        eigh(&DenseHermitian::new(m.clone()).expect("builders are Hermitian")).eigenvalues
    };
    let rot_spec = spec(&rotated);
    let orig_spec = spec(&original);
    let low_lying_deviation = rot_spec
        .iter()
        .zip(&orig_spec)
        .take(4)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    // Consistent truncation: original frame on a grid padded by L/2, restricted
    // to the preimage of the rotated grid.
    let padded = ChargeGrid::from_half_units(grid.half_cutoff() + l)?;
    let big = original_frame(tp, cp, jp, &padded)?.to_dense();
    let n = g * ds;
    let map: Vec<usize> = (0..n)
        .map(|r| {
            let (k, s) = (r / ds, r % ds);
            (k + l - chain_q[s]) * ds + s
        })
        .collect();
    let compressed = DenseMatrix::from_fn(n, n, |i, j| big[(map[i], map[j])]);
    let padded_matrix_deviation = compressed.sub(&rotated).max_abs();
    let padded_spectral_deviation = spec(&compressed)
        .iter()
        .zip(&rot_spec)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    Ok(FrameReport {
        interior_deviation: interior_deviation / norm,
        interior_states: interior.len(),
        norm,
        low_lying_deviation,
        padded_matrix_deviation,
        padded_spectral_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_block_is_exact() {
        let tp = TransmonParams::reference();
        let cp = ChainParams::sweet_spot(12.0, 2);
        let jp = JunctionParams::reference();
        let r = verify_frame_transform(&tp, &cp, &jp, &ChargeGrid::new(4.5).unwrap()).unwrap();
        assert!(r.interior_deviation < 1e-10, "{r:?}");
        assert!(r.interior_states > 0);
        assert!(r.padded_matrix_deviation < 1e-12, "{r:?}");
        assert!(r.padded_spectral_deviation < 1e-9, "{r:?}");
    }

    #[test]
    fn generic_chain_and_transmon() {
        let tp = TransmonParams::new(0.8, 1.3, 0.1).unwrap();
        let cp = ChainParams::new(0.3, 1.1, 0.6, 3).unwrap();
        let jp = JunctionParams::new(0.9, 1.0).unwrap();
        let r = verify_frame_transform(&tp, &cp, &jp, &ChargeGrid::new(2.5).unwrap()).unwrap();
        assert!(r.interior_deviation < 1e-12, "{r:?}");
        assert!(r.padded_spectral_deviation < 1e-9, "{r:?}");
    }
}
