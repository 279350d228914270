//! Basis bookkeeping: the half-integer charge grid, Jordan-Wigner spin
//! registers and their tensor products.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum HilbertError {
    BadCutoff(f64),
    BadHalfsteps(i32),
    SiteOutOfRange { site: usize, len: usize },
    BadSpinCount(usize),
    DimensionMismatch { expected: usize, found: usize },
    UnknownFactor(usize),
}

impl fmt::Display for HilbertError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BadCutoff(c) => write!(
                f,
                "charge cutoff must be a positive multiple of 1/2, got {c}"
            ),
            Self::BadHalfsteps(h) => {
                write!(f, "charge shift must be by ±1 or ±2 half-steps, got {h}")
            }
            Self::SiteOutOfRange { site, len } => write!(f, "site {site} outside 1..={len}"),
            Self::BadSpinCount(n) => write!(f, "spin register must hold 1..=30 sites, got {n}"),
            Self::DimensionMismatch { expected, found } => {
                write!(
                    f,
                    "operator dimension {found} does not match factor dimension {expected}"
                )
            }
            Self::UnknownFactor(i) => write!(f, "no tensor factor with index {i}"),
        }
    }
}

impl core::error::Error for HilbertError {}

/// Charges `-c, -c + 1/2, …, +c` for a half-integer cutoff `c`, stored as the
/// integer `2c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChargeGrid {
    half_cutoff: usize,
}

impl ChargeGrid {
    pub fn new(cutoff: f64) -> Result<Self, HilbertError> {
        let twice = 2.0 * cutoff;
        if !(twice >= 1.0) || twice.fract() != 0.0 || twice > 1e6 {
            return Err(HilbertError::BadCutoff(cutoff));
        }
        Ok(Self {
            half_cutoff: twice as usize,
        })
    }

    /// Grid with cutoff `half_cutoff / 2`.
    pub fn from_half_units(half_cutoff: usize) -> Result<Self, HilbertError> {
        if half_cutoff == 0 {
            return Err(HilbertError::BadCutoff(0.0));
        }
        Ok(Self { half_cutoff })
    }

    pub fn cutoff(&self) -> f64 {
        self.half_cutoff as f64 / 2.0
    }

    pub fn half_cutoff(&self) -> usize {
        self.half_cutoff
    }

    pub fn len(&self) -> usize {
        2 * self.half_cutoff + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Charge of grid index `k`.
    pub fn value(&self, k: usize) -> f64 {
        (k as f64 - self.half_cutoff as f64) / 2.0
    }

    /// `2n` for grid index `k`.
    pub fn twice_value(&self, k: usize) -> i64 {
        k as i64 - self.half_cutoff as i64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.value(k)).collect()
    }

    /// Whether index `k` carries an integer charge.
    pub fn is_integer(&self, k: usize) -> bool {
        self.twice_value(k).rem_euclid(2) == 0
    }

    pub fn number_operator(&self) -> SparseMatrix {
        SparseMatrix::from_diagonal(&self.values())
    }
}

/// Shift `S|n⟩ = |n + halfsteps/2⟩`, truncated to zero at the grid edge.
/// `S(±1)` represents `e^{±iφ/2}` and `S(±2)` represents `e^{±iφ}`.
pub fn charge_shift(grid: &ChargeGrid, halfsteps: i32) -> Result<SparseMatrix, HilbertError> {
    if !matches!(halfsteps, -2 | -1 | 1 | 2) {
        return Err(HilbertError::BadHalfsteps(halfsteps));
    }
    let n = grid.len() as i64;
    let entries = (0..n).filter_map(|k| {
        let to = k + halfsteps as i64;
        (0..n)
            .contains(&to)
            .then(|| (to as usize, k as usize, C64::new(1.0, 0.0)))
    });
    Ok(SparseMatrix::from_triplets(grid.len(), grid.len(), entries))
}

/// `count` spin-1/2 sites; site 1 is the most significant tensor factor and
/// bit value 0 means `σᶻ = +1` (empty fermion site).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinRegister {
    count: usize,
}

impl SpinRegister {
    pub fn new(count: usize) -> Result<Self, HilbertError> {
        if count == 0 || count > 30 {
            return Err(HilbertError::BadSpinCount(count));
        }
        Ok(Self { count })
    }

    /// Register for a junction of two chains of `length` sites each.
    pub fn junction(length: usize) -> Result<Self, HilbertError> {
        Self::new(2 * length)
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dim(&self) -> usize {
        1 << self.count
    }

    /// Occupation (bit) of `site` in basis state `b`.
    pub fn bit(&self, b: usize, site: usize) -> usize {
        (b >> (self.count - site)) & 1
    }

    fn check(&self, site: usize) -> Result<(), HilbertError> {
        if site == 0 || site > self.count {
            return Err(HilbertError::SiteOutOfRange {
                site,
                len: self.count,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chain {
    Left,
    Right,
}

/// Annihilator of the fermion on spin `site` of the register:
/// `(Π_{k<site} σᶻ_k) σ⁻_site` with `σ⁻ = |0⟩⟨1|`.
pub fn jw_annihilator(reg: &SpinRegister, site: usize) -> Result<SparseMatrix, HilbertError> {
    reg.check(site)?;
    let shift = reg.count - site;
    let string_mask = if site == 1 {
        0
    } else {
        ((1usize << (site - 1)) - 1) << (reg.count - site + 1)
    };
    let entries = (0..reg.dim()).filter(|b| (b >> shift) & 1 == 1).map(|b| {
        let sign = if (b & string_mask).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        (b ^ (1 << shift), b, C64::new(sign, 0.0))
    });
    Ok(SparseMatrix::from_triplets(reg.dim(), reg.dim(), entries))
}

/// Annihilator for site `fermion_site` (1-based) of the left or right chain of
/// a junction of two length-`length` chains; the right chain follows the left
/// in Jordan-Wigner order.
pub fn jw_ladder(
    reg: &SpinRegister,
    fermion_site: usize,
    chain: Chain,
    length: usize,
) -> Result<SparseMatrix, HilbertError> {
    if fermion_site == 0 || fermion_site > length {
        return Err(HilbertError::SiteOutOfRange {
            site: fermion_site,
            len: length,
        });
    }
    let global = match chain {
        Chain::Left => fermion_site,
        Chain::Right => fermion_site + length,
    };
    jw_annihilator(reg, global)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
    /// `|1⟩⟨0|`, fills the site.
    Plus,
    /// `|0⟩⟨1|`, empties the site.
    Minus,
}

/// Single-site Pauli operator on the register (no string).
pub fn pauli(reg: &SpinRegister, site: usize, p: Pauli) -> Result<SparseMatrix, HilbertError> {
    reg.check(site)?;
    let shift = reg.count - site;
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let entries = (0..reg.dim()).filter_map(|b| {
        let bit = (b >> shift) & 1;
        let flipped = b ^ (1 << shift);
        match p {
            Pauli::X => Some((flipped, b, one)),
            Pauli::Y => Some((flipped, b, if bit == 0 { i } else { -i })),
            Pauli::Z => Some((b, b, if bit == 0 { one } else { -one })),
            Pauli::Plus => (bit == 0).then_some((flipped, b, one)),
            Pauli::Minus => (bit == 1).then_some((flipped, b, one)),
        }
    });
    Ok(SparseMatrix::from_triplets(reg.dim(), reg.dim(), entries))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorKind {
    Charge(ChargeGrid),
    Spins(SpinRegister),
}

impl FactorKind {
    pub fn dim(&self) -> usize {
        match self {
            Self::Charge(g) => g.len(),
            Self::Spins(r) => r.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub name: String,
    pub kind: FactorKind,
}

/// Ordered tensor product; the first factor is the most significant in the
/// flat index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    factors: Vec<Factor>,
}

impl HilbertSpace {
    pub fn new(factors: Vec<Factor>) -> Self {
        Self { factors }
    }

    /// `transmon ⊗ chains` for a single junction.
    pub fn single(grid: ChargeGrid, spins: SpinRegister) -> Self {
        Self::new(vec![
            Factor {
                name: "transmon".into(),
                kind: FactorKind::Charge(grid),
            },
            Factor {
                name: "chains".into(),
                kind: FactorKind::Spins(spins),
            },
        ])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.kind.dim()).collect()
    }

    pub fn dim(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(self.dims()).fold(0, |acc, (&i, d)| {
            debug_assert!(i < d);
            acc * d + i
        })
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let dims = self.dims();
        let mut out = vec![0; dims.len()];
        for (slot, d) in out.iter_mut().zip(&dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
        out
    }

    fn check_factor(&self, factor: usize) -> Result<usize, HilbertError> {
        self.factors
            .get(factor)
            .map(|f| f.kind.dim())
            .ok_or(HilbertError::UnknownFactor(factor))
    }
}

/// `1 ⊗ … ⊗ op ⊗ … ⊗ 1` with `op` on `factor`.
pub fn embed(
    op: &SparseMatrix,
    factor: usize,
    space: &HilbertSpace,
) -> Result<SparseMatrix, HilbertError> {
    let d = space.check_factor(factor)?;
    if op.rows() != d || op.cols() != d {
        return Err(HilbertError::DimensionMismatch {
            expected: d,
            found: op.rows(),
        });
    }
    let dims = space.dims();
    let before: usize = dims[..factor].iter().product();
    let after: usize = dims[factor + 1..].iter().product();
    Ok(SparseMatrix::identity(before)
        .kron(op)
        .kron(&SparseMatrix::identity(after)))
}

/// Reduced density matrix on factor `keep`.
pub fn partial_trace(
    rho: &DenseMatrix,
    space: &HilbertSpace,
    keep: usize,
) -> Result<DenseMatrix, HilbertError> {
    let d = space.check_factor(keep)?;
    let n = space.dim();
    if rho.rows() != n || rho.cols() != n {
        return Err(HilbertError::DimensionMismatch {
            expected: n,
            found: rho.rows(),
        });
    }
    let dims = space.dims();
    let before: usize = dims[..keep].iter().product();
    let after: usize = dims[keep + 1..].iter().product();
    let mut out = DenseMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut s = C64::new(0.0, 0.0);
            for a in 0..before {
                for b in 0..after {
                    s += rho[((a * d + i) * after + b, (a * d + j) * after + b)];
                }
            }
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

/// Reduced density matrix on factor `keep` of the pure state `psi`.
pub fn partial_trace_pure(
    psi: &[C64],
    space: &HilbertSpace,
    keep: usize,
) -> Result<DenseMatrix, HilbertError> {
    let d = space.check_factor(keep)?;
    if psi.len() != space.dim() {
        return Err(HilbertError::DimensionMismatch {
            expected: space.dim(),
            found: psi.len(),
        });
    }
    let dims = space.dims();
    let before: usize = dims[..keep].iter().product();
    let after: usize = dims[keep + 1..].iter().product();
    let mut out = DenseMatrix::zeros(d, d);
    for a in 0..before {
        for b in 0..after {
            for i in 0..d {
                let x = psi[(a * d + i) * after + b];
                if x.re == 0.0 && x.im == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += x * psi[(a * d + j) * after + b].conj();
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts_and_values() {
        let g = ChargeGrid::new(2.5).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g.value(0), -2.5);
        assert_eq!(g.value(10), 2.5);
        assert!(g.is_integer(1) && !g.is_integer(0));
        assert!(ChargeGrid::new(0.3).is_err());
        assert!(ChargeGrid::new(0.0).is_err());
    }

    #[test]
    fn half_shift_on_smallest_grid() {
        let g = ChargeGrid::new(0.5).unwrap();
        let s = charge_shift(&g, 1).unwrap().to_dense();
        // S|n⟩ = |n + 1/2⟩ on ascending charges places ones below the diagonal.
        let expect = DenseMatrix::from_real(3, 3, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(s, expect);
        assert_eq!(charge_shift(&g, -1).unwrap().to_dense(), expect.transpose());
        assert_eq!(charge_shift(&g, 3), Err(HilbertError::BadHalfsteps(3)));
    }

    #[test]
    fn double_half_shift_is_full_shift() {
        let g = ChargeGrid::new(2.5).unwrap();
        let s1 = charge_shift(&g, 1).unwrap();
        assert_eq!(s1.matmul(&s1), charge_shift(&g, 2).unwrap());
    }

    #[test]
    fn boundary_truncation_is_a_single_projector() {
        let g = ChargeGrid::new(1.5).unwrap();
        let p = charge_shift(&g, 1)
            .unwrap()
            .matmul(&charge_shift(&g, -1).unwrap());
        let mut expect = SparseMatrix::identity(g.len()).to_dense();
        expect[(0, 0)] = C64::new(0.0, 0.0);
        assert_eq!(p.to_dense(), expect);
    }

    #[test]
    fn left_site_one_has_no_string() {
        let reg = SpinRegister::junction(2).unwrap();
        assert_eq!(
            jw_ladder(&reg, 1, Chain::Left, 2).unwrap(),
            pauli(&reg, 1, Pauli::Minus).unwrap()
        );
        assert!(jw_ladder(&reg, 3, Chain::Left, 2).is_err());
    }

    #[test]
    fn flat_and_multi_index_are_inverse() {
        let space =
            HilbertSpace::single(ChargeGrid::new(1.0).unwrap(), SpinRegister::new(4).unwrap());
        assert_eq!(space.dim(), 5 * 16);
        for f in 0..space.dim() {
            assert_eq!(space.flat_index(&space.multi_index(f)), f);
        }
        assert_eq!(space.position("chains"), Some(1));
    }
}
