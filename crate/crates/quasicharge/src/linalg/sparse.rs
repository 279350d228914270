use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use super::{DenseMatrix, LinalgError};

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self::from_triplets(
            d.len(),
            d.len(),
            d.iter().enumerate().map(|(i, &x)| (i, i, C64::new(x, 0.0))),
        )
    }

    /// Builds from `(row, col, value)` entries; duplicates are summed and exact
    /// zeros dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Self {
        let mut t: Vec<(usize, usize, C64)> = entries.into_iter().collect();
        t.sort_unstable_by_key(|a| (a.0, a.1));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values: Vec<C64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        let mut row_of = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            assert!(
                r < rows && c < cols,
                "triplet ({r}, {c}) outside {rows}x{cols}"
            );
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                row_of.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_idx = Vec::with_capacity(indices.len());
        let mut keep_val = Vec::with_capacity(values.len());
        for ((c, v), r) in indices.into_iter().zip(values).zip(row_of) {
            if v.re != 0.0 || v.im != 0.0 {
                indptr[r + 1] += 1;
                keep_idx.push(c);
                keep_val.push(v);
            }
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        Self {
            rows,
            cols,
            indptr,
            indices: keep_idx,
            values: keep_val,
        }
    }

    /// Keeps entries with modulus above `threshold`.
    pub fn from_dense(m: &DenseMatrix, threshold: f64) -> Self {
        let mut t = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)];
                if v.norm() > threshold {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.rows(), m.cols(), t)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries of row `i` as `(col, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let r = self.indptr[i]..self.indptr[i + 1];
        match self.indices[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.cols,
            self.rows,
            self.triplets().map(|(i, j, v)| (j, i, v.conj())),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch in add"
        );
        Self::from_triplets(
            self.rows,
            self.cols,
            self.triplets().chain(other.triplets()),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale_real(-1.0))
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut t = Vec::new();
        let mut acc = vec![C64::new(0.0, 0.0); other.cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; other.cols];
        for i in 0..self.rows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !mark[j] {
                        mark[j] = true;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            for &j in &touched {
                t.push((i, j, acc[j]));
                acc[j] = C64::new(0.0, 0.0);
                mark[j] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.rows, other.cols, t)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.triplets() {
            for (k, l, b) in other.triplets() {
                t.push((i * other.rows + k, j * other.cols + l, a * b));
            }
        }
        Self::from_triplets(self.rows * other.rows, self.cols * other.cols, t)
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.values[k] * x[self.indices[k]];
            }
            *yi = s;
        }
    }

    /// `self · m` for dense `m`.
    pub fn mul_dense(&self, m: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, m.rows());
        let mut out = DenseMatrix::zeros(self.rows, m.cols());
        let c = m.cols();
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for i in 0..self.rows {
            let orow = &mut dst[i * c..(i + 1) * c];
            for k in self.indptr[i]..self.indptr[i + 1] {
                let a = self.values[k];
                let j = self.indices[k];
                for (o, b) in orow.iter_mut().zip(&src[j * c..(j + 1) * c]) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max absolute row sum.
    pub fn norm_bound(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(i, j, _)| i == j)
    }
}

/// Hermitian matrix stored as its upper triangle plus diagonal, with the full
/// CSR form kept for products.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    upper: Vec<(usize, usize, C64)>,
    full: SparseMatrix,
}

impl SparseHermitian {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(m: SparseMatrix) -> Result<Self, LinalgError> {
        if m.rows() == 0 {
            return Err(LinalgError::Empty);
        }
        if m.rows() != m.cols() {
            return Err(LinalgError::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let asym = m.max_asymmetry();
        if asym > Self::TOLERANCE * m.max_abs().max(f64::MIN_POSITIVE) {
            return Err(LinalgError::NotHermitian {
                max_asymmetry: asym,
            });
        }
        let upper: Vec<_> = m
            .triplets()
            .filter(|&(i, j, _)| j >= i)
            .map(|(i, j, v)| {
                if i == j {
                    (i, j, C64::new(v.re, 0.0))
                } else {
                    (i, j, v)
                }
            })
            .collect();
        Ok(Self::from_upper_unchecked(m.rows(), upper))
    }

    /// Builds from one triangle plus diagonal; entries below the diagonal are
    /// mirrored to the upper triangle first.
    pub fn from_triangle(
        dim: usize,
        entries: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self, LinalgError> {
        let mut seen = alloc::collections::BTreeSet::new();
        let mut upper = Vec::new();
        for (i, j, v) in entries {
            let (i, j, v) = if j >= i { (i, j, v) } else { (j, i, v.conj()) };
            if i == j && v.im.abs() > Self::TOLERANCE * v.norm().max(1.0) {
                return Err(LinalgError::NotHermitian {
                    max_asymmetry: 2.0 * v.im.abs(),
                });
            }
            if !seen.insert((i, j)) {
                return Err(LinalgError::DuplicateEntry { row: i, col: j });
            }
            upper.push((i, j, if i == j { C64::new(v.re, 0.0) } else { v }));
        }
        Ok(Self::from_upper_unchecked(dim, upper))
    }

    fn from_upper_unchecked(dim: usize, upper: Vec<(usize, usize, C64)>) -> Self {
        let lower = upper
            .iter()
            .filter(|t| t.0 != t.1)
            .map(|&(i, j, v)| (j, i, v.conj()));
        let full = SparseMatrix::from_triplets(dim, dim, upper.iter().copied().chain(lower));
        Self { upper, full }
    }

    pub fn dim(&self) -> usize {
        self.full.rows()
    }

    /// Upper triangle plus diagonal.
    pub fn triplets(&self) -> &[(usize, usize, C64)] {
        &self.upper
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.full
    }

    pub fn to_dense(&self) -> super::DenseHermitian {
        super::DenseHermitian::new(self.full.to_dense()).expect("stored matrix is Hermitian")
    }

    pub fn norm_bound(&self) -> f64 {
        self.full.norm_bound()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let m = SparseMatrix::from_triplets(
            2,
            2,
            [
                (0, 1, c(1.0, 0.0)),
                (0, 1, c(-1.0, 0.0)),
                (1, 0, c(2.0, 0.0)),
                (1, 0, c(0.5, 0.0)),
            ],
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), c(2.5, 0.0));
    }

    #[test]
    fn sparse_products_match_dense() {
        let a = SparseMatrix::from_triplets(
            3,
            3,
            [
                (0, 1, c(1.0, 2.0)),
                (2, 0, c(-1.0, 0.5)),
                (1, 1, c(3.0, 0.0)),
            ],
        );
        let b = SparseMatrix::from_triplets(
            3,
            2,
            [
                (1, 0, c(0.0, 1.0)),
                (0, 1, c(2.0, 0.0)),
                (2, 1, c(1.0, 1.0)),
            ],
        );
        let dense = a.to_dense().matmul(&b.to_dense());
        assert!(a.matmul(&b).to_dense().sub(&dense).max_abs() < 1e-15);
        assert!(a.mul_dense(&b.to_dense()).sub(&dense).max_abs() < 1e-15);
        let k = a.kron(&b).to_dense();
        assert!(k.sub(&a.to_dense().kron(&b.to_dense())).max_abs() < 1e-15);
    }

    #[test]
    fn triangle_storage_reconstructs_full_matrix() {
        let h =
            SparseHermitian::from_triangle(2, [(0, 0, c(1.0, 0.0)), (1, 0, c(0.0, 1.0))]).unwrap();
        assert_eq!(h.triplets(), &[(0, 0, c(1.0, 0.0)), (0, 1, c(0.0, -1.0))]);
        assert_eq!(h.matrix().get(1, 0), c(0.0, 1.0));
        assert!(
            SparseHermitian::from_triangle(2, [(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))]).is_err()
        );
    }
}
