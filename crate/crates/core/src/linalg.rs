//! Small dense real and complex matrices.
//!
//! Everything here is sized for Jordan-algebra work: r×r element matrices,
//! n×n operators on coordinate vectors, and block Gram matrices of a few
//! hundred rows. Storage is row-major.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Off-diagonal Frobenius mass, relative to the matrix norm, at which Jacobi stops.
pub const JACOBI_TOL: f64 = 1e-14;
/// Sweep cap for cyclic Jacobi.
pub const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "row slice length");
        Self { rows, cols, data: data.to_vec() }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<f64>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec shape");
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "elementwise shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.is_finite())
    }

    /// Frobenius norm of `A - Aᵀ`.
    pub fn asymmetry(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self[(i, j)] - self[(j, i)];
                s += d * d;
            }
        }
        s.sqrt()
    }

    pub fn symmetrized(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    pub fn to_complex(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| Complex64::new(self[(i, j)], 0.0))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// `re + i·im`.
    pub fn from_parts(re: &Matrix, im: &Matrix) -> Self {
        assert_eq!((re.rows, re.cols), (im.rows, im.cols), "complex parts shape");
        Self::from_fn(re.rows, re.cols, |i, j| Complex64::new(re[(i, j)], im[(i, j)]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn re(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].re)
    }

    pub fn im(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].im)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec shape");
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    fn zip_with(&self, rhs: &CMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "elementwise shape");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Frobenius norm of `A - A*`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &CMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Hermitian product `Σ a_k conj(b_k)`.
pub fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching orthonormal
/// eigenvectors as columns. Ties keep the order the rotations produced.
pub fn symmetric_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = a.rows;
    debug_assert!(a.is_square());
    let mut m = a.symmetrized();
    let mut v = Matrix::identity(n);
    let scale = m.frobenius_norm();
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_mass(&m);
        if off <= JACOBI_TOL * scale || scale == 0.0 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_diagonal: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let vals: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    let order = descending_order(&vals);
    let sorted: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let vecs = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((sorted, vecs))
}

fn off_diagonal_mass(m: &Matrix) -> f64 {
    let mut s = 0.0;
    for i in 0..m.rows {
        for j in 0..m.cols {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

fn descending_order(vals: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    // stable: equal eigenvalues keep solver order
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap_or(core::cmp::Ordering::Equal));
    order
}

/// Eigen-decomposition of a complex Hermitian matrix by cyclic complex Jacobi.
///
/// Each step first rotates the phase of the pivot so that it is real, then
/// applies an ordinary plane rotation. Eigenvalues come back descending.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.rows;
    let mut m = a.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm();
    let mut sweeps = 0;
    loop {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[(i, j)].norm_sqr();
                }
            }
        }
        let off = off.sqrt();
        if off <= JACOBI_TOL * scale || scale == 0.0 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_diagonal: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                // pivot = b·e^{iφ}; G = diag-phase · rotation
                let phase = apq / b;
                let theta = (m[(q, q)].re - m[(p, p)].re) / (2.0 * b);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c + mkq * gqp;
                    m[(k, q)] = mkp * s + mkq * gqq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c + mqk * gqp.conj();
                    m[(q, k)] = mpk * s + mqk * gqq.conj();
                }
                m[(p, q)] = Complex64::zero();
                m[(q, p)] = Complex64::zero();
                m[(p, p)].im = 0.0;
                m[(q, q)].im = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * gqp;
                    v[(k, q)] = vkp * s + vkq * gqq;
                }
            }
        }
    }
    let vals: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let order = descending_order(&vals);
    let sorted: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((sorted, vecs))
}

/// Spectrum of a real symmetric matrix by Householder tridiagonalisation and
/// implicit QL. Suited to the larger matrices where Jacobi gets slow.
///
/// Eigenvalues are ascending; eigenvectors (columns) are returned when asked.
pub fn symmetric_eigen_ql(a: &Matrix, want_vectors: bool) -> Result<(Vec<f64>, Option<Matrix>)> {
    let n = a.rows;
    if n == 0 {
        return Ok((Vec::new(), want_vectors.then(|| Matrix::zeros(0, 0))));
    }
    let mut z = a.symmetrized();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut z, &mut d, &mut e, want_vectors);
    tql2(&mut z, &mut d, &mut e, want_vectors)?;
    Ok((d, want_vectors.then_some(z)))
}

// Householder reduction to tridiagonal form (EISPACK tred2 lineage).
#[allow(clippy::needless_range_loop)]
fn tred2(v: &mut Matrix, d: &mut [f64], e: &mut [f64], want_vectors: bool) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    if want_vectors {
        for i in 0..n - 1 {
            v[(n - 1, i)] = v[(i, i)];
            v[(i, i)] = 1.0;
            let h = d[i + 1];
            if h != 0.0 {
                for k in 0..=i {
                    d[k] = v[(k, i + 1)] / h;
                }
                for j in 0..=i {
                    let mut g = 0.0;
                    for k in 0..=i {
                        g += v[(k, i + 1)] * v[(k, j)];
                    }
                    for k in 0..=i {
                        v[(k, j)] -= g * d[k];
                    }
                }
            }
            for k in 0..=i {
                v[(k, i + 1)] = 0.0;
            }
        }
        for j in 0..n {
            d[j] = v[(n - 1, j)];
            v[(n - 1, j)] = 0.0;
        }
        v[(n - 1, n - 1)] = 1.0;
    } else {
        // diagonal of the tridiagonal form is left in the diagonal of `v`
        for i in 0..n - 1 {
            v[(n - 1, i)] = v[(i, i)];
            v[(i, i)] = 1.0;
        }
        for j in 0..n {
            d[j] = v[(n - 1, j)];
        }
    }
    e[0] = 0.0;
}

// Symmetric tridiagonal QL with implicit shifts (EISPACK tql2 lineage).
fn tql2(v: &mut Matrix, d: &mut [f64], e: &mut [f64], want_vectors: bool) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
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
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence { sweeps: iter, off_diagonal: e[l].abs() });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
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
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if want_vectors {
                        for k in 0..n {
                            h = v[(k, i + 1)];
                            v[(k, i + 1)] = s * v[(k, i)] + c * h;
                            v[(k, i)] = c * v[(k, i)] - s * h;
                        }
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
    // ascending sort, carrying vectors
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            if want_vectors {
                for row in 0..n {
                    let tmp = v[(row, i)];
                    v[(row, i)] = v[(row, k)];
                    v[(row, k)] = tmp;
                }
            }
        }
    }
    Ok(())
}

/// Extremal part of a Hermitian spectrum, with the matching unit eigenvectors.
#[derive(Clone, Debug)]
pub struct ExtremalEigen {
    pub min: f64,
    pub max: f64,
    pub min_vector: Vec<Complex64>,
    pub max_vector: Vec<Complex64>,
    pub max_abs: f64,
}

/// All eigenvalues (ascending) of a Hermitian matrix through its real
/// symmetric embedding `[[A, -B], [B, A]]`, whose spectrum is that of
/// `A + iB` with every eigenvalue doubled.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    let (vals, _) = symmetric_eigen_ql(&real_embedding(a), false)?;
    Ok(vals.chunks(2).map(|p| 0.5 * (p[0] + p[p.len() - 1])).collect())
}

/// Smallest and largest eigenpairs of a Hermitian matrix (real embedding + QL).
pub fn hermitian_extremal(a: &CMatrix) -> Result<ExtremalEigen> {
    let n = a.rows;
    let (vals, vecs) = symmetric_eigen_ql(&real_embedding(a), true)?;
    let vecs = vecs.expect("vectors requested");
    let to_complex = |col: usize| -> Vec<Complex64> {
        let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(vecs[(i, col)], vecs[(i + n, col)])).collect();
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 0.0 {
            for z in &mut v {
                *z /= nrm;
            }
        }
        v
    };
    let last = vals.len() - 1;
    Ok(ExtremalEigen {
        min: vals[0],
        max: vals[last],
        min_vector: to_complex(0),
        max_vector: to_complex(last),
        max_abs: vals[0].abs().max(vals[last].abs()),
    })
}

fn real_embedding(a: &CMatrix) -> Matrix {
    let n = a.rows;
    let h = a.hermitian_part();
    Matrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// LU factorisation with partial pivoting, kept for determinant and solves.
struct Lu<T> {
    lu: Vec<T>,
    perm: Vec<usize>,
    sign: f64,
    n: usize,
}

macro_rules! lu_impl {
    ($name:ident, $t:ty, $abs:expr, $zero:expr, $one:expr) => {
        fn $name(data: &[$t], n: usize) -> Option<Lu<$t>> {
            let mut lu = data.to_vec();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut sign = 1.0;
            for k in 0..n {
                let mut piv = k;
                let mut best = $abs(lu[k * n + k]);
                for i in k + 1..n {
                    let v = $abs(lu[i * n + k]);
                    if v > best {
                        best = v;
                        piv = i;
                    }
                }
                if best == 0.0 {
                    return None;
                }
                if piv != k {
                    for j in 0..n {
                        lu.swap(k * n + j, piv * n + j);
                    }
                    perm.swap(k, piv);
                    sign = -sign;
                }
                let pivot = lu[k * n + k];
                for i in k + 1..n {
                    let f = lu[i * n + k] / pivot;
                    lu[i * n + k] = f;
                    for j in k + 1..n {
                        let u = lu[k * n + j];
                        lu[i * n + j] -= f * u;
                    }
                }
            }
            let _ = ($zero, $one);
            Some(Lu { lu, perm, sign, n })
        }
    };
}

lu_impl!(lu_real, f64, |x: f64| x.abs(), 0.0f64, 1.0f64);
lu_impl!(lu_complex, Complex64, |x: Complex64| x.norm(), Complex64::zero(), Complex64::new(1.0, 0.0));

impl Lu<f64> {
    fn det(&self) -> f64 {
        (0..self.n).fold(self.sign, |acc, i| acc * self.lu[i * self.n + i])
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[i * n + k] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.lu[i * n + k] * x[k];
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

impl Lu<Complex64> {
    fn det(&self) -> Complex64 {
        (0..self.n).fold(Complex64::new(self.sign, 0.0), |acc, i| acc * self.lu[i * self.n + i])
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[i * n + k];
                let xk = x[k];
                x[i] -= l * xk;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[i * n + k];
                let xk = x[k];
                x[i] -= u * xk;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

pub fn det(a: &Matrix) -> f64 {
    assert!(a.is_square(), "det of non-square matrix");
    lu_real(&a.data, a.rows).map_or(0.0, |lu| lu.det())
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.rows;
    let lu = lu_real(&a.data, n)?;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            lu.solve(&e)
        })
        .collect();
    Some(Matrix::from_columns(&cols))
}

pub fn solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    lu_real(&a.data, a.rows).map(|lu| lu.solve(b))
}

pub fn cdet(a: &CMatrix) -> Complex64 {
    assert_eq!(a.rows, a.cols, "det of non-square matrix");
    lu_complex(&a.data, a.rows).map_or(Complex64::zero(), |lu| lu.det())
}

pub fn cinverse(a: &CMatrix) -> Option<CMatrix> {
    let n = a.rows;
    let lu = lu_complex(&a.data, n)?;
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![Complex64::zero(); n];
        e[j] = Complex64::new(1.0, 0.0);
        let x = lu.solve(&e);
        for i in 0..n {
            out[(i, j)] = x[i];
        }
    }
    Some(out)
}

pub fn csolve(a: &CMatrix, b: &[Complex64]) -> Option<Vec<Complex64>> {
    lu_complex(&a.data, a.rows).map(|lu| lu.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let a = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        a.add(&a.transpose())
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        a.add(&a.adjoint())
    }

    #[test]
    fn jacobi_two_by_two() {
        let a = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        assert_relative_eq!(vals[0], 3.0, epsilon = 1e-14);
        assert_relative_eq!(vals[1], 1.0, epsilon = 1e-14);
        assert_relative_eq!(vecs[(0, 0)].abs(), 0.5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn jacobi_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 3, 6, 10] {
            let a = random_symmetric(n, &mut rng);
            let (vals, v) = symmetric_eigen(&a).unwrap();
            let d = Matrix::from_fn(n, n, |i, j| if i == j { vals[i] } else { 0.0 });
            let back = v.matmul(&d).matmul(&v.transpose());
            assert!(back.sub(&a).frobenius_norm() < 1e-12 * (1.0 + a.frobenius_norm()));
            assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn hermitian_jacobi_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 5, 9] {
            let a = random_hermitian(n, &mut rng);
            let (vals, v) = hermitian_eigen(&a).unwrap();
            let d =
                CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(vals[i], 0.0) } else { Complex64::zero() });
            let back = v.matmul(&d).matmul(&v.adjoint());
            assert!(back.sub(&a).frobenius_norm() < 1e-12 * (1.0 + a.frobenius_norm()));
            let unit = v.adjoint().matmul(&v).sub(&CMatrix::identity(n)).frobenius_norm();
            assert!(unit < 1e-12);
        }
    }

    #[test]
    fn ql_matches_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 7, 30] {
            let a = random_symmetric(n, &mut rng);
            let (mut jac, _) = symmetric_eigen(&a).unwrap();
            jac.reverse();
            let (ql, vecs) = symmetric_eigen_ql(&a, true).unwrap();
            for (x, y) in jac.iter().zip(&ql) {
                assert_relative_eq!(x, y, epsilon = 1e-11);
            }
            let v = vecs.unwrap();
            let d = Matrix::from_fn(n, n, |i, j| if i == j { ql[i] } else { 0.0 });
            assert!(v.matmul(&d).matmul(&v.transpose()).sub(&a).frobenius_norm() < 1e-11);
            let (ql_only, none) = symmetric_eigen_ql(&a, false).unwrap();
            assert!(none.is_none());
            for (x, y) in ql_only.iter().zip(&ql) {
                assert_relative_eq!(x, y, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn hermitian_embedding_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(8, &mut rng);
        let (mut jac, _) = hermitian_eigen(&a).unwrap();
        jac.reverse();
        let emb = hermitian_eigenvalues(&a).unwrap();
        for (x, y) in jac.iter().zip(&emb) {
            assert_relative_eq!(x, y, epsilon = 1e-11);
        }
        let ext = hermitian_extremal(&a).unwrap();
        assert_relative_eq!(ext.min, jac[0], epsilon = 1e-11);
        assert_relative_eq!(ext.max, jac[7], epsilon = 1e-11);
        let av = a.matvec(&ext.min_vector);
        for (x, v) in av.iter().zip(&ext.min_vector) {
            assert!((x - v * ext.min).norm() < 1e-10);
        }
    }

    #[test]
    fn lu_det_inverse() {
        let a = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        assert_relative_eq!(det(&a), 3.0, epsilon = 1e-14);
        let inv = inverse(&a).unwrap();
        assert_relative_eq!(inv[(0, 0)], 2.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(inv[(0, 1)], -1.0 / 3.0, epsilon = 1e-14);
        assert!(inverse(&Matrix::zeros(2, 2)).is_none());

        let c = CMatrix::from_fn(2, 2, |i, j| Complex64::new((i + j) as f64, (i as f64) - (j as f64) + 0.5));
        let ci = cinverse(&c).unwrap();
        assert!(c.matmul(&ci).sub(&CMatrix::identity(2)).frobenius_norm() < 1e-13);
        // det = (0+0.5i)(2+0.5i) - (1-0.5i)(1+1.5i)
        let expect =
            Complex64::new(0.0, 0.5) * Complex64::new(2.0, 0.5) - Complex64::new(1.0, -0.5) * Complex64::new(1.0, 1.5);
        assert!((cdet(&c) - expect).norm() < 1e-14);
    }
}
