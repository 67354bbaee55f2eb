//! Compressed sparse row operator with complex entries.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

/// Rows per parallel task in matrix-vector products; small operators run serially.
const PAR_MIN_DIM: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
    hermitian: bool,
}

impl SparseOperator {
    /// Assemble from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(dim: usize, mut trip: Vec<(usize, usize, C64)>, hermitian: bool) -> Self {
        trip.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(trip.len());
        let mut vals: Vec<C64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows_of = Vec::with_capacity(trip.len());
        for (r, c, v) in trip {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside dimension {dim}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                rows_of.push(r);
                last = Some((r, c));
            }
        }
        let keep: Vec<bool> = vals.iter().map(|v| *v != C64::new(0.0, 0.0)).collect();
        let mut k = 0;
        let mut cols2 = Vec::with_capacity(cols.len());
        let mut vals2 = Vec::with_capacity(vals.len());
        for i in 0..cols.len() {
            if keep[i] {
                cols2.push(cols[i]);
                vals2.push(vals[i]);
                row_ptr[rows_of[i] + 1] += 1;
                k += 1;
            }
        }
        debug_assert_eq!(k, cols2.len());
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self { dim, row_ptr, cols: cols2, vals: vals2, hermitian }
    }

    pub fn diagonal(diag: &[C64], hermitian: bool) -> Self {
        let trip = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(diag.len(), trip, hermitian)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); dim], true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_hermitian_flagged(&self) -> bool {
        self.hermitian
    }

    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn max_row_nnz(&self) -> usize {
        self.row_ptr.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// Largest `|row - col|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.dim).flat_map(|r| self.row(r).map(move |(c, _)| r.abs_diff(c))).max().unwrap_or(0)
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    #[inline]
    fn row_dot(&self, r: usize, x: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k in self.row_ptr[r]..self.row_ptr[r + 1] {
            acc += self.vals[k] * x[self.cols[k]];
        }
        acc
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        if self.dim >= PAR_MIN_DIM {
            y.par_iter_mut().enumerate().with_min_len(4096).for_each(|(r, yr)| *yr = self.row_dot(r, x));
        } else {
            for (r, yr) in y.iter_mut().enumerate() {
                *yr = self.row_dot(r, x);
            }
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim];
        self.apply(x, &mut y);
        y
    }

    /// `y = A x` for a real operator acting on a real vector. Imaginary
    /// parts of the stored entries are ignored; callers check [`is_real`](Self::is_real).
    pub fn apply_real(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let row = |r: usize| {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k].re * x[self.cols[k]];
            }
            acc
        };
        if self.dim >= PAR_MIN_DIM {
            y.par_iter_mut().enumerate().with_min_len(4096).for_each(|(r, yr)| *yr = row(r));
        } else {
            for (r, yr) in y.iter_mut().enumerate() {
                *yr = row(r);
            }
        }
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..self.dim {
            acc += psi[r].conj() * self.row_dot(r, psi);
        }
        acc
    }

    pub fn adjoint(&self) -> Self {
        let mut trip = Vec::with_capacity(self.nnz());
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                trip.push((c, r, v.conj()));
            }
        }
        Self::from_triplets(self.dim, trip, self.hermitian)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        out.hermitian = self.hermitian && s.im == 0.0;
        out.drop_zeros()
    }

    fn drop_zeros(self) -> Self {
        let mut trip = Vec::with_capacity(self.nnz());
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                trip.push((r, c, v));
            }
        }
        Self::from_triplets(self.dim, trip, self.hermitian)
    }

    /// `A + s B`.
    pub fn add_scaled(&self, other: &Self, s: C64) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut trip = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.dim {
            trip.extend(self.row(r).map(|(c, v)| (r, c, v)));
            trip.extend(other.row(r).map(|(c, v)| (r, c, s * v)));
        }
        Self::from_triplets(self.dim, trip, false)
    }

    /// Sparse product `A B`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut trip = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    trip.push((r, c, a * b));
                }
            }
        }
        Self::from_triplets(self.dim, trip, false)
    }

    /// Commutator `[A, B]`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).add_scaled(&other.matmul(self), C64::new(-1.0, 0.0))
    }

    /// Entrywise `max |A - B|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = self.add_scaled(other, C64::new(-1.0, 0.0));
        d.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Entrywise `max |A - A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Real part as a dense matrix (for real symmetric operators).
    pub fn to_dense_real(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v.re;
            }
        }
        m
    }
}
