use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::kitaev::kitaev_on_register;
use super::{
    transmon_eigenbasis, ChainParams, ChargeOffset, ModelError, TransmonParams, TwoQubitParams,
    SPARSE_LIMIT,
};
use crate::hilbert::{
    charge_shift, jw_annihilator, ChargeGrid, Factor, FactorKind, HilbertSpace, SpinRegister,
};
use crate::linalg::{DenseMatrix, SparseHermitian, SparseMatrix};
use crate::C64;
#[allow(unused_imports)]
use num_traits::Float;

/// Placement of the six two-site chains on the 12-spin register.
///
/// `b1 | a1 c1 | c2 b2 | a2`: the middle four chains sit on the two islands,
/// the outer two are grounded. Qubit 1 tunnels between sites 2 and 3, the
/// islands between sites 6 and 7, qubit 2 between sites 10 and 11.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoQubitLayout;

impl TwoQubitLayout {
    pub const CHAINS: [(&'static str, usize); 6] = [
        ("b1", 1),
        ("a1", 3),
        ("c1", 5),
        ("c2", 7),
        ("b2", 9),
        ("a2", 11),
    ];
    pub const SPINS: usize = 12;
    pub const CHAIN_LENGTH: usize = 2;

    pub fn first_site(name: &str) -> Option<usize> {
        Self::CHAINS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|&(_, s)| s)
    }

    /// Chains whose charge sits on island `qubit` (1 or 2).
    pub fn island(qubit: usize) -> [&'static str; 2] {
        if qubit == 1 {
            ["a1", "c1"]
        } else {
            ["c2", "b2"]
        }
    }

    /// Junctions `(left site, right site)`: qubit 1, coupler, qubit 2.
    pub const JUNCTIONS: [(usize, usize); 3] = [(2, 3), (6, 7), (10, 11)];
}

/// `transmon1 ⊗ transmon2 ⊗ chains`.
pub fn two_qubit_space(grids: (&ChargeGrid, &ChargeGrid)) -> Result<HilbertSpace, ModelError> {
    Ok(HilbertSpace::new(vec![
        Factor {
            name: String::from("transmon1"),
            kind: FactorKind::Charge(*grids.0),
        },
        Factor {
            name: String::from("transmon2"),
            kind: FactorKind::Charge(*grids.1),
        },
        Factor {
            name: String::from("chains"),
            kind: FactorKind::Spins(SpinRegister::new(TwoQubitLayout::SPINS)?),
        },
    ]))
}

#[derive(Debug, Clone)]
pub struct TwoQubitModel {
    pub space: HilbertSpace,
    pub hamiltonian: SparseHermitian,
}

fn island_charge(reg: &SpinRegister, qubit: usize) -> Vec<f64> {
    let sites: Vec<usize> = TwoQubitLayout::island(qubit)
        .iter()
        .flat_map(|name| {
            let first = TwoQubitLayout::first_site(name).expect("layout chain");
            first..first + TwoQubitLayout::CHAIN_LENGTH
        })
        .collect();
    (0..reg.dim())
        .map(|b| sites.iter().map(|&s| reg.bit(b, s)).sum::<usize>() as f64)
        .collect()
}

fn hop(reg: &SpinRegister, (from, to): (usize, usize)) -> Result<SparseMatrix, ModelError> {
    Ok(jw_annihilator(reg, from)?
        .adjoint()
        .matmul(&jw_annihilator(reg, to)?))
}

/// Rotated-frame two-qubit Hamiltonian on `charge₁ ⊗ charge₂ ⊗ 2^12`:
/// two transmons, six chains and three tunneling junctions,
/// `-w1(e^{-iφ₁/2} b1†a1 + h.c.) - w2(e^{iφ₂/2} b2†a2 + h.c.)
///  - w12(e^{i(φ₁-φ₂)/2} c1†c2 + h.c.)` between facing chain ends.
pub fn build_two_qubit(
    tp: &TransmonParams,
    cp: &ChainParams,
    tq: &TwoQubitParams,
    grids: (&ChargeGrid, &ChargeGrid),
    offset: ChargeOffset,
) -> Result<TwoQubitModel, ModelError> {
    if cp.length != TwoQubitLayout::CHAIN_LENGTH {
        return Err(ModelError::Unsupported(
            "two-qubit chains must have two sites",
        ));
    }
    let (g1, g2) = grids;
    let space = two_qubit_space(grids)?;
    let dim = space.dim();
    if dim > SPARSE_LIMIT {
        return Err(ModelError::TooLarge {
            dim,
            limit: SPARSE_LIMIT,
        });
    }
    let reg = SpinRegister::new(TwoQubitLayout::SPINS)?;
    let ds = reg.dim();
    let (id1, id2, ids) = (
        SparseMatrix::identity(g1.len()),
        SparseMatrix::identity(g2.len()),
        SparseMatrix::identity(ds),
    );

    let cos = |g: &ChargeGrid| -> Result<SparseMatrix, ModelError> {
        Ok(charge_shift(g, 2)?
            .add(&charge_shift(g, -2)?)
            .scale_real(-tp.e_j / 2.0))
    };
    let (n1, n2) = (island_charge(&reg, 1), island_charge(&reg, 2));
    let (v1, v2) = (g1.values(), g2.values());
    let mut diag = Vec::with_capacity(dim);
    for a in &v1 {
        for b in &v2 {
            for s in 0..ds {
                let (q1, q2) = match offset {
                    ChargeOffset::Omitted => (0.0, 0.0),
                    ChargeOffset::Included => (n1[s] / 2.0, n2[s] / 2.0),
                };
                diag.push(tp.e_c * ((a - q1 - tp.n_g).powi(2) + (b - q2 - tp.n_g).powi(2)));
            }
        }
    }
    let mut h = SparseMatrix::from_diagonal(&diag)
        .add(&cos(g1)?.kron(&id2).kron(&ids))
        .add(&id1.kron(&cos(g2)?).kron(&ids));

    let one = C64::new(1.0, 0.0);
    let mut chains = SparseMatrix::zeros(ds, ds);
    for (_, first) in TwoQubitLayout::CHAINS {
        chains = chains.add(&kitaev_on_register(cp, &reg, first, one)?);
    }
    h = h.add(&id1.kron(&id2).kron(&chains));

    let [j1, j12, j2] = TwoQubitLayout::JUNCTIONS;
    let terms = [
        charge_shift(g1, -1)?
            .kron(&id2)
            .kron(&hop(&reg, j1)?)
            .scale_real(-tq.w1),
        id1.kron(&charge_shift(g2, 1)?)
            .kron(&hop(&reg, j2)?)
            .scale_real(-tq.w2),
        charge_shift(g1, 1)?
            .kron(&charge_shift(g2, -1)?)
            .kron(&hop(&reg, j12)?)
            .scale_real(-tq.w12),
    ];
    for t in &terms {
        h = h.add(t).add(&t.adjoint());
    }
    Ok(TwoQubitModel {
        space,
        hamiltonian: SparseHermitian::new(h)?,
    })
}

/// Projected model `Σ_j [E_01 Z_j + (w_j/2) c₁₀ X_j] + (w12/2) c₂ X₁X₂` in the
/// basis `|00⟩, |01⟩, |10⟩, |11⟩` of transmon ground states.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveTwoQubit {
    pub e01: [f64; 2],
    pub c10: [f64; 2],
    /// `(⟨ψ̃_1|e^{iφ/2}|ψ̃_0⟩₁ ⟨ψ̃_1|e^{-iφ/2}|ψ̃_0⟩₂ + c.c.)/2`.
    pub c2: f64,
    /// `⟨00|C|11⟩, ⟨11|C|00⟩, ⟨01|C|10⟩, ⟨10|C|01⟩` for `C = cos((φ₂ - φ₁)/2)`,
    /// each evaluated on the product charge grid.
    pub anti_diagonal: [f64; 4],
    pub params: TwoQubitParams,
    pub hamiltonian: DenseMatrix,
}

pub fn effective_two_qubit(
    tp: &TransmonParams,
    tq: &TwoQubitParams,
    grids: (&ChargeGrid, &ChargeGrid),
) -> Result<EffectiveTwoQubit, ModelError> {
    let b1 = transmon_eigenbasis(tp, grids.0)?;
    let b2 = transmon_eigenbasis(tp, grids.1)?;
    let c2 = b1.shift_element(1, 0, 1) * b2.shift_element(1, 0, -1);

    let cross = charge_shift(grids.0, -1)?.kron(&charge_shift(grids.1, 1)?);
    let cos12 = cross.add(&cross.adjoint()).scale_real(0.5);
    let product = |i: usize, j: usize| -> Vec<C64> {
        let (u, v) = (b1.vector(i), b2.vector(j));
        u.iter()
            .flat_map(|a| v.iter().map(move |b| a * b))
            .collect()
    };
    let element = |bra: (usize, usize), ket: (usize, usize)| -> f64 {
        let l = product(bra.0, bra.1);
        let r = cos12.matvec(&product(ket.0, ket.1));
        l.iter().zip(&r).map(|(a, b)| a.conj() * b).sum::<C64>().re
    };
    let anti_diagonal = [
        element((0, 0), (1, 1)),
        element((1, 1), (0, 0)),
        element((0, 1), (1, 0)),
        element((1, 0), (0, 1)),
    ];

    let e01 = [b1.e01(), b2.e01()];
    let c10 = [b1.c10(), b2.c10()];
    let (x1, x2, xx) = (
        tq.w1 / 2.0 * c10[0],
        tq.w2 / 2.0 * c10[1],
        tq.w12 / 2.0 * c2,
    );
    let hamiltonian = DenseMatrix::from_fn(4, 4, |r, c| {
        let v = if r == c {
            let z = |bit: usize| if bit == 0 { 1.0 } else { -1.0 };
            e01[0] * z(r >> 1) + e01[1] * z(r & 1)
        } else {
            match r ^ c {
                0b10 => x1,
                0b01 => x2,
                0b11 => xx,
                _ => 0.0,
            }
        };
        C64::new(v, 0.0)
    });
    Ok(EffectiveTwoQubit {
        e01,
        c10,
        c2,
        anti_diagonal,
        params: *tq,
        hamiltonian,
    })
}
