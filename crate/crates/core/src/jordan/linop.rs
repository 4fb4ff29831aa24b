use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use super::{Algebra, ComplexElement, Element};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Matrix};

/// A real linear operator on `J`, as an n×n matrix on orthonormal coordinates.
///
/// Because the basis is orthonormal for the trace form, the matrix transpose
/// is the form adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct LinOp {
    alg: Algebra,
    mat: Matrix,
}

impl LinOp {
    pub fn from_matrix(alg: Algebra, mat: Matrix) -> Result<Self> {
        let n = alg.dim();
        if mat.rows() != n || mat.cols() != n {
            return Err(Error::CoordinateLength { expected: n, found: mat.rows() });
        }
        if !mat.is_finite() {
            return Err(Error::Domain("operator has non-finite entries"));
        }
        Ok(Self { alg, mat })
    }

    pub(crate) fn from_matrix_unchecked(alg: Algebra, mat: Matrix) -> Self {
        Self { alg, mat }
    }

    pub fn identity(alg: Algebra) -> Self {
        Self { alg, mat: Matrix::identity(alg.dim()) }
    }

    pub fn zero(alg: Algebra) -> Self {
        Self { alg, mat: Matrix::zeros(alg.dim(), alg.dim()) }
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix {
        self.mat
    }

    pub fn apply(&self, v: &Element) -> Result<Element> {
        self.alg.check_same(&v.algebra())?;
        Element::from_coords(self.alg, &self.mat.matvec(&v.to_coords()))
    }

    /// `(Q v | w)`.
    pub fn form(&self, v: &Element, w: &Element) -> Result<f64> {
        self.alg.check_same(&v.algebra())?;
        self.alg.check_same(&w.algebra())?;
        Ok(linalg::dot(&self.mat.matvec(&v.to_coords()), &w.to_coords()))
    }

    pub fn compose(&self, rhs: &LinOp) -> Result<LinOp> {
        self.alg.check_same(&rhs.alg)?;
        Ok(Self { alg: self.alg, mat: self.mat.matmul(&rhs.mat) })
    }

    pub fn transpose(&self) -> LinOp {
        Self { alg: self.alg, mat: self.mat.transpose() }
    }

    pub fn add(&self, rhs: &LinOp) -> Result<LinOp> {
        self.alg.check_same(&rhs.alg)?;
        Ok(Self { alg: self.alg, mat: self.mat.add(&rhs.mat) })
    }

    pub fn sub(&self, rhs: &LinOp) -> Result<LinOp> {
        self.alg.check_same(&rhs.alg)?;
        Ok(Self { alg: self.alg, mat: self.mat.sub(&rhs.mat) })
    }

    pub fn scale(&self, s: f64) -> LinOp {
        Self { alg: self.alg, mat: self.mat.scale(s) }
    }

    /// Operator trace `Tr`.
    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    /// Operator determinant `Det`.
    pub fn det(&self) -> f64 {
        linalg::det(&self.mat)
    }

    pub fn inverse(&self) -> Result<LinOp> {
        linalg::inverse(&self.mat).map(|mat| Self { alg: self.alg, mat }).ok_or(Error::Singular { det: 0.0 })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.frobenius_norm()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.mat.asymmetry() <= tol * (1.0 + self.mat.frobenius_norm())
    }

    pub fn symmetrized(&self) -> LinOp {
        Self { alg: self.alg, mat: self.mat.symmetrized() }
    }

    /// Eigenvalues of the symmetric part, descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(linalg::symmetric_eigen(&self.mat)?.0)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = self.eigenvalues()?;
        Ok(vals[vals.len() - 1])
    }

    pub fn to_complex(&self) -> ComplexLinOp {
        ComplexLinOp::from_matrix_unchecked(self.alg, self.mat.to_complex())
    }
}

/// A complex-linear operator on the complexification `𝕁`, on the same coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexLinOp {
    alg: Algebra,
    mat: CMatrix,
}

impl ComplexLinOp {
    pub fn from_matrix(alg: Algebra, mat: CMatrix) -> Result<Self> {
        let n = alg.dim();
        if mat.rows() != n || mat.cols() != n {
            return Err(Error::CoordinateLength { expected: n, found: mat.rows() });
        }
        Ok(Self { alg, mat })
    }

    pub(crate) fn from_matrix_unchecked(alg: Algebra, mat: CMatrix) -> Self {
        Self { alg, mat }
    }

    pub fn identity(alg: Algebra) -> Self {
        Self { alg, mat: CMatrix::identity(alg.dim()) }
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn apply(&self, v: &ComplexElement) -> Result<ComplexElement> {
        self.alg.check_same(&v.algebra())?;
        ComplexElement::from_coords(self.alg, &self.mat.matvec(&v.to_coords()))
    }

    pub fn compose(&self, rhs: &ComplexLinOp) -> Result<ComplexLinOp> {
        self.alg.check_same(&rhs.alg)?;
        Ok(Self { alg: self.alg, mat: self.mat.matmul(&rhs.mat) })
    }

    /// Conjugate transpose, the adjoint for the Hermitian extension of the trace form.
    pub fn adjoint(&self) -> ComplexLinOp {
        Self { alg: self.alg, mat: self.mat.adjoint() }
    }

    pub fn transpose(&self) -> ComplexLinOp {
        Self { alg: self.alg, mat: self.mat.transpose() }
    }

    pub fn sub(&self, rhs: &ComplexLinOp) -> Result<ComplexLinOp> {
        self.alg.check_same(&rhs.alg)?;
        Ok(Self { alg: self.alg, mat: self.mat.sub(&rhs.mat) })
    }

    pub fn add(&self, rhs: &ComplexLinOp) -> Result<ComplexLinOp> {
        self.alg.check_same(&rhs.alg)?;
        Ok(Self { alg: self.alg, mat: self.mat.add(&rhs.mat) })
    }

    pub fn scale(&self, s: Complex64) -> ComplexLinOp {
        Self { alg: self.alg, mat: self.mat.scale(s) }
    }

    pub fn inverse(&self) -> Result<ComplexLinOp> {
        linalg::cinverse(&self.mat).map(|mat| Self { alg: self.alg, mat }).ok_or(Error::Singular { det: 0.0 })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.frobenius_norm()
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.mat.hermitian_defect()
    }

    pub fn is_finite(&self) -> bool {
        self.mat.is_finite()
    }
}
