mod common;

use common::*;
use proptest::prelude::*;
use quasicharge::linalg::{
    eigh, expmv_dense, expmv_krylov, norm, rk4_lindblad, DenseHermitian, DenseMatrix,
    KrylovOptions, Rk4Options, SparseHermitian, SparseMatrix,
};
use quasicharge::C64;

#[test]
fn eigh_reconstructs_random_hermitian_up_to_512() {
    let mut r = rng(7);
    for n in [1, 2, 5, 17, 64, 512] {
        let h = random_hermitian(&mut r, n);
        let ed = eigh(&h);
        let back = ed.reconstruct_with(|x| C64::new(x, 0.0));
        assert!(
            back.sub(h.matrix()).max_abs() <= 1e-9 * h.matrix().max_abs(),
            "n = {n}"
        );
        let gram = ed.eigenvectors.adjoint().matmul(&ed.eigenvectors);
        assert!(
            gram.sub(&DenseMatrix::identity(n)).max_abs() < 1e-12,
            "n = {n}"
        );
    }
}

#[test]
fn eigh_matches_nalgebra_spectrum() {
    let mut r = rng(11);
    for n in [3, 9, 40] {
        let h = random_hermitian(&mut r, n);
        let ours = eigh(&h).eigenvalues;
        let oracle = oracle_spectrum(h.matrix());
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-11, "n = {n}: {a} vs {b}");
        }
    }
}

#[test]
fn eigenpair_residuals_meet_contract() {
    let mut r = rng(3);
    let h = random_hermitian(&mut r, 96);
    let ed = eigh(&h);
    let scale = h.matrix().max_abs();
    for k in 0..ed.dim() {
        let v = ed.vector(k);
        let hv = h.matrix().matvec(&v);
        let res: Vec<C64> = hv
            .iter()
            .zip(&v)
            .map(|(a, b)| a - b * ed.eigenvalues[k])
            .collect();
        assert!(norm(&res) <= 1e-10 * scale);
        assert!((norm(&v) - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn real_symmetric_input_gives_real_positive_leading_eigenvectors() {
    let mut r = rng(5);
    let n = 30;
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = C64::new(rand::Rng::gen_range(&mut r, -1.0..1.0), 0.0);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    let ed = eigh(&DenseHermitian::new(m).unwrap());
    for k in 0..n {
        let v = ed.vector(k);
        assert!(v.iter().all(|z| z.im.abs() <= 1e-10));
        let first = v.iter().find(|z| z.norm() > 1e-8).unwrap();
        assert!(first.re > 0.0);
    }
}

#[test]
fn sparse_and_dense_propagation_agree() {
    let mut r = rng(13);
    let h = random_hermitian(&mut r, 6);
    let sp = SparseHermitian::new(SparseMatrix::from_dense(h.matrix(), 0.0)).unwrap();
    let v = random_vector(&mut r, 6);
    for t in [0.1, 1.0, 7.5, -3.0] {
        let a = expmv_dense(&h, &v, t).unwrap();
        let b = expmv_krylov(&sp, &v, t, &KrylovOptions::default()).unwrap();
        assert!(max_diff(&a, &b) < 1e-8, "t = {t}");
    }
}

#[test]
fn krylov_handles_large_sparse_chain() {
    // Tight-binding ring: exact propagation from the Bloch eigenbasis.
    let n = 2000;
    let h = SparseHermitian::new(SparseMatrix::from_triplets(
        n,
        n,
        (0..n).flat_map(|i| {
            [
                (i, (i + 1) % n, C64::new(-1.0, 0.0)),
                ((i + 1) % n, i, C64::new(-1.0, 0.0)),
            ]
        }),
    ))
    .unwrap();
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[0] = C64::new(1.0, 0.0);
    let t = 3.0;
    let out = expmv_krylov(&h, &v, t, &KrylovOptions::default()).unwrap();
    for x in [0usize, 1, 5] {
        let exact: C64 = (0..n)
            .map(|k| {
                let q = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                C64::from_polar(1.0 / n as f64, q * x as f64 + 2.0 * q.cos() * t)
            })
            .sum();
        assert!((out[x] - exact).norm() < 1e-9, "site {x}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn expmv_preserves_norm(seed in 0u64..u64::MAX, n in 1usize..9, t in -20.0f64..20.0) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n);
        let v = random_vector(&mut r, n);
        prop_assume!(norm(&v) > 1e-6);
        let out = expmv_dense(&h, &v, t).unwrap();
        prop_assert!((norm(&out) - norm(&v)).abs() <= 1e-9 * norm(&v));
        let sp = SparseHermitian::new(SparseMatrix::from_dense(h.matrix(), 0.0)).unwrap();
        let out = expmv_krylov(&sp, &v, t, &KrylovOptions::default()).unwrap();
        prop_assert!((norm(&out) - norm(&v)).abs() <= 1e-9 * norm(&v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn lindblad_keeps_trace_and_hermiticity(seed in 0u64..u64::MAX, alpha in 0.0f64..0.5) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, 4);
        let l = random_hermitian(&mut r, 4);
        let psi = random_vector(&mut r, 4);
        let nrm = norm(&psi);
        let psi: Vec<C64> = psi.iter().map(|z| z / nrm).collect();
        let grid: Vec<f64> = (0..6).map(|k| 0.4 * k as f64).collect();
        let out = rk4_lindblad(&h, &l, alpha, &DenseMatrix::outer(&psi), &grid, &Rk4Options::default()).unwrap();
        for rho in &out {
            prop_assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-8);
            prop_assert!(rho.max_asymmetry() == 0.0);
        }
    }

    #[test]
    fn pure_dephasing_never_raises_purity(seed in 0u64..u64::MAX, alpha in 0.01f64..1.0) {
        let mut r = rng(seed);
        let zero = DenseHermitian::new(DenseMatrix::zeros(4, 4)).unwrap();
        let l = random_hermitian(&mut r, 4);
        let psi = random_vector(&mut r, 4);
        let nrm = norm(&psi);
        let psi: Vec<C64> = psi.iter().map(|z| z / nrm).collect();
        let grid: Vec<f64> = (0..20).map(|k| 0.1 * k as f64).collect();
        let out = rk4_lindblad(&zero, &l, alpha, &DenseMatrix::outer(&psi), &grid, &Rk4Options::default()).unwrap();
        let purity: Vec<f64> = out.iter().map(|rho| rho.matmul(rho).trace().re).collect();
        for w in purity.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }
}
