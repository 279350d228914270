use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64 as C64;

use super::{eigh, DenseHermitian, DenseMatrix, LinalgError, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rk4Options {
    /// Upper bound on `dt · (2‖h‖ + 2α‖l‖²)`, the step times a bound on the
    /// generator norm.
    pub step_norm: f64,
    /// Optional absolute cap on `dt`.
    pub max_dt: Option<f64>,
}

impl Default for Rk4Options {
    fn default() -> Self {
        Self {
            step_norm: 0.05,
            max_dt: None,
        }
    }
}

/// Integrates `dρ/dt = -i[h, ρ] - (α/2)[l, [l, ρ]]` with classical RK4 and
/// returns `ρ` at every time in `t_grid` (the first entry is the initial
/// time). Each interval is split into equal steps no longer than allowed by
/// `opts`, and `ρ` is re-Hermitized after every step.
pub fn rk4_lindblad(
    h: &DenseHermitian,
    l: &DenseHermitian,
    alpha: f64,
    rho0: &DenseMatrix,
    t_grid: &[f64],
    opts: &Rk4Options,
) -> Result<Vec<DenseMatrix>, LinalgError> {
    let mut out = Vec::with_capacity(t_grid.len());
    rk4_lindblad_observe(h, l, alpha, rho0, t_grid, opts, |_, rho| {
        out.push(rho.clone())
    })?;
    Ok(out)
}

/// Same integration as [`rk4_lindblad`], handing `(index, ρ(t_index))` to
/// `observe` instead of storing every state.
pub fn rk4_lindblad_observe(
    h: &DenseHermitian,
    l: &DenseHermitian,
    alpha: f64,
    rho0: &DenseMatrix,
    t_grid: &[f64],
    opts: &Rk4Options,
    mut observe: impl FnMut(usize, &DenseMatrix),
) -> Result<(), LinalgError> {
    let n = h.dim();
    if l.dim() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: l.dim(),
        });
    }
    if alpha < 0.0 || alpha.is_nan() {
        return Err(LinalgError::NegativeRate(alpha));
    }
    check_state(rho0, n)?;
    let hs = SparseMatrix::from_dense(h.matrix(), 0.0);
    let ls = SparseMatrix::from_dense(l.matrix(), 0.0);
    let gen_norm = liouvillian_norm_bound(h, l, alpha);
    let dt_max = {
        let dt = opts.step_norm / gen_norm.max(f64::MIN_POSITIVE);
        opts.max_dt.map_or(dt, |m| m.min(dt))
    };

    let mut rho = rho0.clone();
    rho.hermitize();
    let Some(&t_first) = t_grid.first() else {
        return Ok(());
    };
    observe(0, &rho);
    let mut t_prev = t_first;
    for (i, &t) in t_grid.iter().enumerate().skip(1) {
        let span = t - t_prev;
        assert!(span >= 0.0, "time grid must be ascending");
        if span > 0.0 {
            let steps = (span / dt_max).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            for _ in 0..steps {
                rho = rk4_step(&hs, &ls, alpha, &rho, dt);
                rho.hermitize();
            }
        }
        observe(i, &rho);
        t_prev = t;
    }
    Ok(())
}

/// Bound on the norm of `ρ ↦ -i[h, ρ] - (α/2)[l, [l, ρ]]`.
pub fn liouvillian_norm_bound(h: &DenseHermitian, l: &DenseHermitian, alpha: f64) -> f64 {
    2.0 * h.norm_bound() + 2.0 * alpha * l.norm_bound().powi(2)
}

fn rk4_step(
    h: &SparseMatrix,
    l: &SparseMatrix,
    alpha: f64,
    rho: &DenseMatrix,
    dt: f64,
) -> DenseMatrix {
    let k1 = generator(h, l, alpha, rho);
    let k2 = generator(h, l, alpha, &shifted(rho, &k1, dt / 2.0));
    let k3 = generator(h, l, alpha, &shifted(rho, &k2, dt / 2.0));
    let k4 = generator(h, l, alpha, &shifted(rho, &k3, dt));
    let mut next = rho.clone();
    let s = C64::new(dt / 6.0, 0.0);
    next.axpy(s, &k1);
    next.axpy(s * 2.0, &k2);
    next.axpy(s * 2.0, &k3);
    next.axpy(s, &k4);
    next
}

fn shifted(rho: &DenseMatrix, k: &DenseMatrix, dt: f64) -> DenseMatrix {
    let mut r = rho.clone();
    r.axpy(C64::new(dt, 0.0), k);
    r
}

/// For Hermitian `ρ` the commutators reduce to `Hρ - (Hρ)†` and, with the
/// anti-Hermitian `X = [l, ρ]`, `[l, X] = lX + (lX)†`.
fn generator(h: &SparseMatrix, l: &SparseMatrix, alpha: f64, rho: &DenseMatrix) -> DenseMatrix {
    let n = rho.rows();
    let hr = h.mul_dense(rho);
    let mut out = DenseMatrix::zeros(n, n);
    let minus_i = C64::new(0.0, -1.0);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = minus_i * (hr[(i, j)] - hr[(j, i)].conj());
        }
    }
    if alpha > 0.0 {
        let lr = l.mul_dense(rho);
        let mut x = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                x[(i, j)] = lr[(i, j)] - lr[(j, i)].conj();
            }
        }
        let lx = l.mul_dense(&x);
        let half = -alpha / 2.0;
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += (lx[(i, j)] + lx[(j, i)].conj()) * half;
            }
        }
    }
    out
}

fn check_state(rho: &DenseMatrix, n: usize) -> Result<(), LinalgError> {
    if rho.rows() != n || rho.cols() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: rho.rows(),
        });
    }
    let asym = rho.max_asymmetry();
    if asym > 1e-10 {
        return Err(LinalgError::NonPhysicalState {
            reason: "not Hermitian",
            value: asym,
        });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(LinalgError::NonPhysicalState {
            reason: "trace differs from 1",
            value: (tr - 1.0).norm(),
        });
    }
    let herm = DenseHermitian::new(rho.clone()).map_err(|_| LinalgError::NonPhysicalState {
        reason: "not Hermitian",
        value: asym,
    })?;
    let min_eig = eigh(&herm).eigenvalues[0];
    if min_eig < -1e-8 {
        return Err(LinalgError::NonPhysicalState {
            reason: "negative eigenvalue",
            value: min_eig,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn plus_state() -> DenseMatrix {
        DenseMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5])
    }

    #[test]
    fn pure_dephasing_decays_coherence_exponentially() {
        let h = DenseHermitian::new(DenseMatrix::zeros(2, 2)).unwrap();
        let z = DenseHermitian::from_real_symmetric(2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        let alpha = 0.3;
        let grid = [0.0, 0.5, 1.0, 2.0];
        let opts = Rk4Options {
            max_dt: Some(0.01),
            ..Rk4Options::default()
        };
        let out = rk4_lindblad(&h, &z, alpha, &plus_state(), &grid, &opts).unwrap();
        for (rho, &t) in out.iter().zip(&grid) {
            assert!((rho[(0, 1)].re - 0.5 * (-2.0 * alpha * t).exp()).abs() < 1e-9);
            assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_noise_leaves_unitary_dynamics() {
        let h = DenseHermitian::from_real_symmetric(2, &[0.3, 1.0, 1.0, -0.2]).unwrap();
        let id = DenseHermitian::new(DenseMatrix::identity(2)).unwrap();
        let psi0 = [c(1.0, 0.0), c(0.0, 0.0)];
        let rho0 = DenseMatrix::outer(&psi0);
        let grid = [0.0, 1.3];
        let exact = DenseMatrix::outer(&crate::linalg::expmv_dense(&h, &psi0, 1.3).unwrap());
        for alpha in [0.0, 0.5] {
            let out = rk4_lindblad(&h, &id, alpha, &rho0, &grid, &Rk4Options::default()).unwrap();
            let err = out[1].sub(&exact).max_abs();
            assert!(err < 1e-7, "alpha {alpha}: {err:e}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let h = DenseHermitian::new(DenseMatrix::zeros(2, 2)).unwrap();
        let bad = DenseMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]);
        assert!(matches!(
            rk4_lindblad(&h, &h, 0.0, &bad, &[0.0], &Rk4Options::default()),
            Err(LinalgError::NonPhysicalState {
                reason: "negative eigenvalue",
                ..
            })
        ));
        assert_eq!(
            rk4_lindblad(&h, &h, -1.0, &plus_state(), &[0.0], &Rk4Options::default()),
            Err(LinalgError::NegativeRate(-1.0))
        );
    }
}
