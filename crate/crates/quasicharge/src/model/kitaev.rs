use alloc::vec::Vec;

use super::{ChainParams, ModelError, DENSE_LIMIT};
use crate::hilbert::{jw_annihilator, SpinRegister};
use crate::linalg::SparseMatrix;
use crate::C64;

/// Phase attached to the annihilating pair `c_j c_{j+1}` of the pairing term.
#[derive(Debug, Clone, Copy)]
pub enum PairingPhase<'a> {
    Fixed(C64),
    /// An operator on a charge factor, such as `e^{iφ}`; the chain then lives
    /// on `charge ⊗ chain`.
    Operator(&'a SparseMatrix),
}

pub(crate) struct KitaevParts {
    /// `Σ -μ n_j - t(c_j†c_{j+1} + h.c.)`.
    pub normal: SparseMatrix,
    /// `Σ c_j c_{j+1}`.
    pub pair: SparseMatrix,
}

pub(crate) fn kitaev_parts(
    cp: &ChainParams,
    reg: &SpinRegister,
    first_site: usize,
) -> Result<KitaevParts, ModelError> {
    let c: Vec<SparseMatrix> = (0..cp.length)
        .map(|j| jw_annihilator(reg, first_site + j))
        .collect::<Result<_, _>>()?;
    let cd: Vec<SparseMatrix> = c.iter().map(|m| m.adjoint()).collect();
    let dim = reg.dim();
    let mut normal = SparseMatrix::zeros(dim, dim);
    let mut pair = SparseMatrix::zeros(dim, dim);
    for j in 0..cp.length {
        normal = normal.add(&cd[j].matmul(&c[j]).scale_real(-cp.mu));
        if j + 1 < cp.length {
            let hop = cd[j].matmul(&c[j + 1]);
            normal = normal.add(&hop.add(&hop.adjoint()).scale_real(-cp.t_hop));
            pair = pair.add(&c[j].matmul(&c[j + 1]));
        }
    }
    Ok(KitaevParts { normal, pair })
}

/// Chain occupying register sites `first_site..first_site + L` with pairing
/// `|Δ|(p c_j c_{j+1} + p* c_{j+1}†c_j†)`.
pub fn kitaev_on_register(
    cp: &ChainParams,
    reg: &SpinRegister,
    first_site: usize,
    phase: C64,
) -> Result<SparseMatrix, ModelError> {
    let parts = kitaev_parts(cp, reg, first_site)?;
    let pair = parts.pair.scale(phase * cp.delta_abs);
    Ok(parts.normal.add(&pair).add(&pair.adjoint()))
}

/// `H = Σ_j -μ c_j†c_j - t(c_j†c_{j+1} + h.c.) + |Δ|(p c_j c_{j+1} + h.c.)`
/// on the `2^L` Jordan-Wigner space of one chain, or on `charge ⊗ chain` when
/// the phase is an operator.
pub fn build_kitaev_fermionic(
    cp: &ChainParams,
    phase: PairingPhase<'_>,
) -> Result<SparseMatrix, ModelError> {
    let reg = SpinRegister::new(cp.length)?;
    let extra = match phase {
        PairingPhase::Fixed(_) => 1,
        PairingPhase::Operator(p) => p.rows(),
    };
    let dim = reg.dim() * extra;
    if cp.length > 12 || dim > DENSE_LIMIT * 4 {
        return Err(ModelError::TooLarge {
            dim,
            limit: DENSE_LIMIT,
        });
    }
    match phase {
        PairingPhase::Fixed(p) => kitaev_on_register(cp, &reg, 1, p),
        PairingPhase::Operator(p) => {
            let parts = kitaev_parts(cp, &reg, 1)?;
            let id = SparseMatrix::identity(p.rows());
            let pair = p.kron(&parts.pair).scale_real(cp.delta_abs);
            Ok(id.kron(&parts.normal).add(&pair).add(&pair.adjoint()))
        }
    }
}
