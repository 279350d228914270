use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64 as C64;

use super::eigh::{eigh, eigh_tridiagonal, EigenDecomposition};
use super::{inner, norm, DenseHermitian, LinalgError, SparseHermitian, SparseMatrix};

/// Linear map usable by the Krylov propagator.
pub trait Operator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
    /// Any upper bound on the spectral norm.
    fn norm_bound(&self) -> f64;
}

impl Operator for DenseHermitian {
    fn dim(&self) -> usize {
        DenseHermitian::dim(self)
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.copy_from_slice(&self.matrix().matvec(x));
    }
    fn norm_bound(&self) -> f64 {
        DenseHermitian::norm_bound(self)
    }
}

impl Operator for SparseHermitian {
    fn dim(&self) -> usize {
        SparseHermitian::dim(self)
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.matrix().matvec_into(x, y);
    }
    fn norm_bound(&self) -> f64 {
        SparseHermitian::norm_bound(self)
    }
}

impl Operator for SparseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.matvec_into(x, y);
    }
    fn norm_bound(&self) -> f64 {
        SparseMatrix::norm_bound(self)
    }
}

/// `e^{-iHt}` through a cached eigendecomposition.
#[derive(Debug, Clone)]
pub struct DensePropagator {
    eig: EigenDecomposition,
}

impl DensePropagator {
    pub fn new(h: &DenseHermitian) -> Self {
        Self { eig: eigh(h) }
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn apply(&self, v: &[C64], t: f64) -> Result<Vec<C64>, LinalgError> {
        let n = self.eig.dim();
        if v.len() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        let u = &self.eig.eigenvectors;
        let mut coeff = vec![C64::new(0.0, 0.0); n];
        for (i, &vi) in v.iter().enumerate() {
            if vi.re == 0.0 && vi.im == 0.0 {
                continue;
            }
            for (k, ck) in coeff.iter_mut().enumerate() {
                *ck += u[(i, k)].conj() * vi;
            }
        }
        for (k, ck) in coeff.iter_mut().enumerate() {
            *ck *= C64::from_polar(1.0, -self.eig.eigenvalues[k] * t);
        }
        Ok((0..n)
            .map(|i| (0..n).map(|k| u[(i, k)] * coeff[k]).sum())
            .collect())
    }
}

/// `e^{-iHt} v` through the eigendecomposition of `h`.
pub fn expmv_dense(h: &DenseHermitian, v: &[C64], t: f64) -> Result<Vec<C64>, LinalgError> {
    if norm(v) == 0.0 {
        return Err(LinalgError::ZeroVector);
    }
    DensePropagator::new(h).apply(v, t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    /// Lanczos subspace size.
    pub subspace: usize,
    /// Bound on the per-step residual estimate, relative to `‖v‖`.
    pub tolerance: f64,
    /// Number of step halvings tolerated before giving up.
    pub max_rejections: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            subspace: 30,
            tolerance: 1e-10,
            max_rejections: 60,
        }
    }
}

/// Dense operators go through the eigendecomposition, sparse ones through
/// [`expmv_krylov`] with default options.
pub fn expmv<'a>(
    h: impl Into<HermitianRef<'a>>,
    v: &[C64],
    t: f64,
) -> Result<Vec<C64>, LinalgError> {
    match h.into() {
        HermitianRef::Dense(d) => expmv_dense(d, v, t),
        HermitianRef::Sparse(s) => expmv_krylov(s, v, t, &KrylovOptions::default()),
    }
}

#[derive(Debug, Clone, Copy)]
pub enum HermitianRef<'a> {
    Dense(&'a DenseHermitian),
    Sparse(&'a SparseHermitian),
}

impl<'a> From<&'a DenseHermitian> for HermitianRef<'a> {
    fn from(h: &'a DenseHermitian) -> Self {
        Self::Dense(h)
    }
}

impl<'a> From<&'a SparseHermitian> for HermitianRef<'a> {
    fn from(h: &'a SparseHermitian) -> Self {
        Self::Sparse(h)
    }
}

/// `e^{-iHt} v` by Lanczos with full reorthogonalization and adaptive time
/// steps. A step of length `τ` is accepted when `β_m |[e^{-iτT_m} e_1]_m|`
/// is below the tolerance.
pub fn expmv_krylov<O: Operator + ?Sized>(
    h: &O,
    v: &[C64],
    t: f64,
    opts: &KrylovOptions,
) -> Result<Vec<C64>, LinalgError> {
    let n = h.dim();
    if v.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let v_norm = norm(v);
    if v_norm == 0.0 {
        return Err(LinalgError::ZeroVector);
    }
    let mut w = v.to_vec();
    if t == 0.0 {
        return Ok(w);
    }
    let dir = t.signum();
    let total = t.abs();
    let anorm = h.norm_bound().max(f64::MIN_POSITIVE);
    let m_max = opts.subspace.clamp(2, n.max(2));
    let mut done = 0.0;
    let mut step = total.min(0.5 * m_max as f64 / anorm);

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m_max + 1);
    let mut scratch = vec![C64::new(0.0, 0.0); n];
    while done < total {
        let beta0 = norm(&w);
        basis.clear();
        basis.push(w.iter().map(|z| z / beta0).collect());
        let mut alpha = Vec::with_capacity(m_max);
        let mut beta = Vec::with_capacity(m_max);
        let mut invariant = false;
        let target = step.min(total - done);
        for j in 0..m_max {
            h.apply(&basis[j], &mut scratch);
            let mut next = scratch.clone();
            let a = inner(&basis[j], &next).re;
            alpha.push(a);
            for _ in 0..2 {
                for q in &basis {
                    let c = inner(q, &next);
                    for (x, y) in next.iter_mut().zip(q) {
                        *x -= c * y;
                    }
                }
            }
            let b = norm(&next);
            beta.push(b);
            if b <= 1e-13 * anorm {
                invariant = true;
                break;
            }
            // Short steps rarely need the full subspace.
            let k = j + 1;
            if k >= 4 && k % 2 == 0 && k < m_max {
                let (vals, z) = eigh_tridiagonal(&alpha, &beta[..k - 1]);
                let last: C64 = (0..k)
                    .map(|c| C64::from_polar(z[(k - 1) * k + c] * z[c], -dir * target * vals[c]))
                    .sum();
                if b * last.norm() <= opts.tolerance {
                    break;
                }
            }
            next.iter_mut().for_each(|z| *z /= b);
            basis.push(next);
        }
        let k = alpha.len();
        let (vals, z) = eigh_tridiagonal(&alpha, &beta[..k - 1]);
        let coeffs = |tau: f64| -> Vec<C64> {
            (0..k)
                .map(|r| {
                    (0..k)
                        .map(|c| C64::from_polar(z[r * k + c] * z[c], -dir * tau * vals[c]))
                        .sum()
                })
                .collect()
        };
        let remaining = total - done;
        let mut tau = if invariant { remaining } else { target };
        let mut rejections = 0;
        let y = loop {
            let y = coeffs(tau);
            let err = if invariant {
                0.0
            } else {
                beta[k - 1] * y[k - 1].norm()
            };
            if err <= opts.tolerance {
                let growth = if err > 0.0 {
                    (0.9 * (opts.tolerance / err).powf(1.0 / k as f64)).min(2.0)
                } else {
                    2.0
                };
                step = (tau * growth).max(tau);
                break y;
            }
            rejections += 1;
            if rejections > opts.max_rejections {
                return Err(LinalgError::KrylovStalled {
                    residual: err,
                    subspace: k,
                });
            }
            tau *= 0.5;
        };
        for x in w.iter_mut() {
            *x = C64::new(0.0, 0.0);
        }
        for (c, q) in y.iter().zip(&basis) {
            let c = c * beta0;
            for (x, b) in w.iter_mut().zip(q) {
                *x += c * b;
            }
        }
        done += tau;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let h = DenseHermitian::new(DenseMatrix::zeros(3, 3)).unwrap();
        let v = vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)];
        let out = expmv_dense(&h, &v, 5.0).unwrap();
        assert!(out.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-15));
        let sp = SparseHermitian::new(SparseMatrix::zeros(3, 3)).unwrap();
        let out = expmv_krylov(&sp, &v, 5.0, &KrylovOptions::default()).unwrap();
        assert!(out.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn eigenstate_only_acquires_phase() {
        let z = DenseHermitian::from_real_symmetric(2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        let v = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let out = expmv_dense(&z, &v, core::f64::consts::PI).unwrap();
        assert!((inner(&out, &v).norm() - 1.0).abs() < 1e-14);
        assert!((out[0] - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let h = DenseHermitian::new(DenseMatrix::identity(2)).unwrap();
        assert_eq!(
            expmv_dense(&h, &[c(1.0, 0.0)], 1.0),
            Err(LinalgError::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn stalled_krylov_names_residual() {
        let n = 40;
        let h = SparseHermitian::new(SparseMatrix::from_triplets(
            n,
            n,
            (0..n - 1).flat_map(|i| [(i, i + 1, c(50.0, 0.0)), (i + 1, i, c(50.0, 0.0))]),
        ))
        .unwrap();
        let mut v = vec![c(0.0, 0.0); n];
        v[0] = c(1.0, 0.0);
        let opts = KrylovOptions {
            subspace: 3,
            tolerance: 1e-14,
            max_rejections: 2,
        };
        match expmv_krylov(&h, &v, 10.0, &opts) {
            Err(LinalgError::KrylovStalled { residual, subspace }) => {
                assert!(residual > 1e-14);
                assert_eq!(subspace, 3);
            }
            other => panic!("expected stall, got {other:?}"),
        }
    }
}
