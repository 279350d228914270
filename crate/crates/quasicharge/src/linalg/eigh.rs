use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64 as C64;

use super::{DenseHermitian, DenseMatrix};

/// Ascending eigenvalues with orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DenseMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `U diag(f(λ)) U†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> DenseMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let mut out = DenseMatrix::zeros(n, n);
        for k in 0..n {
            let fk = f(self.eigenvalues[k]);
            for i in 0..n {
                let a = u[(i, k)] * fk;
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * u[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Householder reduction to a Hermitian tridiagonal form, a diagonal phase
/// change making it real, then implicit QL with Wilkinson shifts. Each
/// eigenvector is rotated so its first significant component is real and
/// positive; real symmetric input therefore yields real eigenvectors.
pub fn eigh(h: &DenseHermitian) -> EigenDecomposition {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut q = DenseMatrix::identity(n);
    let mut sub = vec![C64::new(0.0, 0.0); n.saturating_sub(1)];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<C64> = (0..m).map(|i| a[(k + 1 + i, k)]).collect();
        let xnorm = super::norm(&x);
        let tail = super::norm(&x[1..]);
        if tail == 0.0 {
            sub[k] = x[0];
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vn = super::norm(&v);
        v.iter_mut().for_each(|z| *z /= vn);

        // A <- H A H on the trailing block, H = I - 2 v v†.
        let off = k + 1;
        let p: Vec<C64> = (0..m)
            .map(|i| (0..m).map(|j| a[(off + i, off + j)] * v[j]).sum())
            .collect();
        let kappa = super::inner(&v, &p).re;
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * kappa).collect();
        for i in 0..m {
            for j in 0..m {
                a[(off + i, off + j)] -= (v[i] * w[j].conj() + w[i] * v[j].conj()) * 2.0;
            }
        }
        a[(off, k)] = alpha;
        a[(k, off)] = alpha.conj();
        for i in 1..m {
            a[(off + i, k)] = C64::new(0.0, 0.0);
            a[(k, off + i)] = C64::new(0.0, 0.0);
        }
        sub[k] = alpha;

        // Q <- Q H.
        for r in 0..n {
            let s: C64 = (0..m).map(|j| q[(r, off + j)] * v[j]).sum::<C64>() * 2.0;
            for j in 0..m {
                let d = s * v[j].conj();
                q[(r, off + j)] -= d;
            }
        }
    }
    if n >= 2 {
        sub[n - 2] = a[(n - 1, n - 2)];
    }

    // Phase diagonal D with D† T D real.
    let mut phases = vec![C64::new(1.0, 0.0); n];
    let mut e = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let s = sub[k];
        let r = s.norm();
        phases[k + 1] = if r > 0.0 {
            phases[k] * s / r
        } else {
            phases[k]
        };
        e[k] = r;
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql2(&mut d, &mut e, &mut z, n);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        d[i].partial_cmp(&d[j])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();

    let mut qd = q;
    for r in 0..n {
        for c in 0..n {
            qd[(r, c)] *= phases[c];
        }
    }
    let mut vecs = DenseMatrix::zeros(n, n);
    for r in 0..n {
        for (col, &src) in order.iter().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..n {
                s += qd[(r, k)] * z[k * n + src];
            }
            vecs[(r, col)] = s;
        }
    }
    for col in 0..n {
        fix_phase_column(&mut vecs, col);
    }
    EigenDecomposition {
        eigenvalues,
        eigenvectors: vecs,
    }
}

/// Eigenpairs of the real symmetric tridiagonal matrix with diagonal `diag`
/// and off-diagonal `off`; eigenvectors are returned column-major in `z`
/// (`z[k * n + j]` is component `k` of vector `j`), ascending.
pub fn eigh_tridiagonal(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql2(&mut d, &mut e, &mut z, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        d[i].partial_cmp(&d[j])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let vals = order.iter().map(|&i| d[i]).collect();
    let mut zs = vec![0.0; n * n];
    for k in 0..n {
        for (c, &src) in order.iter().enumerate() {
            zs[k * n + c] = z[k * n + src];
        }
    }
    (vals, zs)
}

fn fix_phase_column(v: &mut DenseMatrix, col: usize) {
    let n = v.rows();
    let scale = (0..n).map(|i| v[(i, col)].norm()).fold(0.0, f64::max);
    let nrm = (0..n).map(|i| v[(i, col)].norm_sqr()).sum::<f64>().sqrt();
    let Some(first) = (0..n).find(|&i| v[(i, col)].norm() > 1e-8 * scale) else {
        return;
    };
    let c = v[(first, col)];
    let rot = c.conj() / (c.norm() * nrm);
    for i in 0..n {
        let z = v[(i, col)] * rot;
        v[(i, col)] = z;
    }
    v[(first, col)].im = 0.0;
}

/// Implicit QL on a symmetric tridiagonal matrix (`d` diagonal, `e[i]` couples
/// `i` and `i+1`), accumulating rotations into row-major `z`.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) {
    if n == 0 {
        return;
    }
    e[n - 1] = 0.0;

    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            loop {
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk1 = z[k * n + i + 1];
                        let zk = z[k * n + i];
                        z[k * n + i + 1] = s * zk + c * zk1;
                        z[k * n + i] = c * zk - s * zk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn residual(h: &DenseHermitian, ed: &EigenDecomposition) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..ed.dim() {
            let v = ed.vector(k);
            let hv = h.matrix().matvec(&v);
            let r: Vec<C64> = hv
                .iter()
                .zip(&v)
                .map(|(a, b)| a - b * ed.eigenvalues[k])
                .collect();
            worst = worst.max(super::super::norm(&r));
        }
        worst
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let ed = eigh(&DenseHermitian::new(DenseMatrix::identity(3)).unwrap());
        assert_eq!(ed.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let ed = eigh(&DenseHermitian::new(DenseMatrix::diagonal(&[2.0, -1.0, 0.0])).unwrap());
        assert_eq!(ed.eigenvalues, vec![-1.0, 0.0, 2.0]);
    }

    #[test]
    fn pauli_x_eigenvectors_are_phase_fixed() {
        let x = DenseHermitian::from_real_symmetric(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let ed = eigh(&x);
        assert!((ed.eigenvalues[0] + 1.0).abs() < 1e-15 && (ed.eigenvalues[1] - 1.0).abs() < 1e-15);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let v0 = ed.vector(0);
        let v1 = ed.vector(1);
        assert!((v0[0] - c(s, 0.0)).norm() < 1e-15 && (v0[1] - c(-s, 0.0)).norm() < 1e-15);
        assert!((v1[0] - c(s, 0.0)).norm() < 1e-15 && (v1[1] - c(s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn complex_hermitian_residuals_are_small() {
        let n = 7;
        let h = DenseHermitian::new(DenseMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (i as f64, j as f64);
            if i == j {
                c(a * 0.7 - 2.0, 0.0)
            } else if i < j {
                c((a + 2.0 * b).sin(), (a * b).cos())
            } else {
                c((b + 2.0 * a).sin(), -(a * b).cos())
            }
        }))
        .unwrap();
        let ed = eigh(&h);
        assert!(residual(&h, &ed) < 1e-12 * h.norm_bound());
        assert!(ed.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn tridiagonal_solver_matches_known_spectrum() {
        // Free chain of 4 sites: eigenvalues 2 cos(kπ/5).
        let (vals, _) = eigh_tridiagonal(&[0.0; 4], &[1.0; 3]);
        let mut expect: Vec<f64> = (1..=4)
            .map(|k| 2.0 * (k as f64 * core::f64::consts::PI / 5.0).cos())
            .collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in vals.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
