//! Small dense complex matrices and a Hermitian Cholesky factorization.
//!
//! Matrices are column-major so that a user's channel vector is one contiguous
//! column.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from equally long columns.
    ///
    /// Panics if the columns differ in length.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let rows = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            assert_eq!(c.len(), rows, "ragged columns");
            data.extend_from_slice(c);
        }
        CMatrix {
            rows,
            cols: columns.len(),
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                data.push(f(r, c));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> &[Complex64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn column_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// `selfᴴ · self`, the K×K Gram matrix of the columns.
    pub fn gram(&self) -> CMatrix {
        let k = self.cols;
        let mut g = CMatrix::zeros(k, k);
        for j in 0..k {
            let cj = self.column(j);
            for i in 0..=j {
                let v = dot(self.column(i), cj);
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
        g
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            for l in 0..self.cols {
                let b = rhs[(l, j)];
                if b == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let a = self.column(l);
                let o = out.column_mut(j);
                for (oi, ai) in o.iter_mut().zip(a) {
                    *oi += ai * b;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Multiplies every entry of column `c` by `s`.
    pub fn scale_column(&mut self, c: usize, s: f64) {
        for v in self.column_mut(c) {
            *v *= s;
        }
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[c * self.rows + r]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[c * self.rows + r]
    }
}

/// Hermitian inner product `aᴴ b`.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Lower-triangular factor `L` of a Hermitian positive definite `A = L Lᴴ`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    n: usize,
    // row-major lower triangle, full storage
    l: Vec<Complex64>,
}

impl Cholesky {
    /// Returns `None` when `a` is not numerically positive definite.
    pub fn factor(a: &CMatrix) -> Option<Self> {
        let n = a.rows();
        assert_eq!(n, a.cols(), "Cholesky needs a square matrix");
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d <= 0.0 || !d.is_finite() {
                return None;
            }
            let djj = libm::sqrt(d);
            l[j * n + j] = Complex64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        Some(Cholesky { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * b[k];
            }
            b[i] = s / self.l[i * n + i].re;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l[k * n + i].conj() * b[k];
            }
            b[i] = s / self.l[i * n + i].re;
        }
    }

    /// Diagonal of `A⁻¹`, from `‖L⁻¹ eᵢ‖²` by forward substitution.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let n = self.n;
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        (0..n)
            .map(|i| {
                z[i] = Complex64::new(1.0 / self.l[i * n + i].re, 0.0);
                let mut acc = z[i].norm_sqr();
                for r in i + 1..n {
                    let mut s = Complex64::new(0.0, 0.0);
                    for k in i..r {
                        s -= self.l[r * n + k] * z[k];
                    }
                    z[r] = s / self.l[r * n + r].re;
                    acc += z[r].norm_sqr();
                }
                acc
            })
            .collect()
    }
}
