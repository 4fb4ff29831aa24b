use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use super::element::Storage;
use super::{Algebra, ComplexLinOp, Element, Family};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Matrix};

/// A point `x + iy` of the complexification `𝕁 = J ⊕ iJ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexElement {
    re: Element,
    im: Element,
}

const I: Complex64 = Complex64::new(0.0, 1.0);

impl ComplexElement {
    pub fn new(re: Element, im: Element) -> Result<Self> {
        re.algebra().check_same(&im.algebra())?;
        Ok(Self { re, im })
    }

    pub fn from_real(re: Element) -> Self {
        let im = Element::zero(re.algebra());
        Self { re, im }
    }

    /// `i·y`.
    pub fn imaginary(im: Element) -> Self {
        let re = Element::zero(im.algebra());
        Self { re, im }
    }

    pub fn zero(alg: Algebra) -> Self {
        Self { re: Element::zero(alg), im: Element::zero(alg) }
    }

    pub fn identity(alg: Algebra) -> Self {
        Self::from_real(Element::identity(alg))
    }

    pub fn algebra(&self) -> Algebra {
        self.re.algebra()
    }

    pub fn re(&self) -> &Element {
        &self.re
    }

    pub fn im(&self) -> &Element {
        &self.im
    }

    /// Complex coordinates `coords(x) + i·coords(y)`.
    pub fn to_coords(&self) -> Vec<Complex64> {
        self.re.to_coords().into_iter().zip(self.im.to_coords()).map(|(a, b)| Complex64::new(a, b)).collect()
    }

    pub fn from_coords(alg: Algebra, c: &[Complex64]) -> Result<Self> {
        let re: Vec<f64> = c.iter().map(|z| z.re).collect();
        let im: Vec<f64> = c.iter().map(|z| z.im).collect();
        Ok(Self { re: Element::from_coords(alg, &re)?, im: Element::from_coords(alg, &im)? })
    }

    /// Matrix families: the complex r×r matrix `X + iY`.
    pub fn to_cmatrix(&self) -> Option<CMatrix> {
        let x = self.re.to_cmatrix()?;
        let y = self.im.to_cmatrix()?;
        Some(x.add(&y.scale(I)))
    }

    /// Inverse of [`ComplexElement::to_cmatrix`]. For the real symmetric
    /// family the matrix must be complex symmetric; for the Hermitian family
    /// any square matrix splits as `X + iY` with `X`, `Y` Hermitian.
    pub fn from_cmatrix(alg: Algebra, a: &CMatrix) -> Result<Self> {
        let r = alg.rank();
        if a.rows() != r || a.cols() != r {
            return Err(Error::CoordinateLength { expected: r, found: a.rows() });
        }
        match alg.family() {
            Family::SymR => {
                let sym = |m: Matrix| m.symmetrized();
                Ok(Self {
                    re: Element::from_storage(alg, Storage::Sym(sym(a.re()))),
                    im: Element::from_storage(alg, Storage::Sym(sym(a.im()))),
                })
            }
            Family::HermC => {
                let x = a.hermitian_part();
                let adj = a.adjoint();
                let y = CMatrix::from_fn(r, r, |i, j| (a[(i, j)] - adj[(i, j)]) / (2.0 * I)).hermitian_part();
                Ok(Self {
                    re: Element::from_storage(alg, Storage::Herm(x)),
                    im: Element::from_storage(alg, Storage::Herm(y)),
                })
            }
            Family::Spin => Err(Error::Unsupported("spin factor has no matrix form")),
        }
    }

    /// Spin factor: complex `(t, u)`.
    pub fn spin_parts(&self) -> Option<(Complex64, Vec<Complex64>)> {
        let (t, u) = self.re.as_spin()?;
        let (s, v) = self.im.as_spin()?;
        Some((Complex64::new(t, s), u.iter().zip(v).map(|(a, b)| Complex64::new(*a, *b)).collect()))
    }

    pub fn from_spin_parts(alg: Algebra, t: Complex64, u: &[Complex64]) -> Result<Self> {
        Ok(Self {
            re: Element::from_spin(alg, t.re, u.iter().map(|z| z.re).collect())?,
            im: Element::from_spin(alg, t.im, u.iter().map(|z| z.im).collect())?,
        })
    }

    pub fn add(&self, o: &ComplexElement) -> Result<ComplexElement> {
        Ok(Self { re: self.re.add(&o.re)?, im: self.im.add(&o.im)? })
    }

    pub fn sub(&self, o: &ComplexElement) -> Result<ComplexElement> {
        Ok(Self { re: self.re.sub(&o.re)?, im: self.im.sub(&o.im)? })
    }

    pub fn scale(&self, s: Complex64) -> ComplexElement {
        Self {
            re: self.re.scale(s.re).add_unchecked(&self.im.scale(-s.im)),
            im: self.re.scale(s.im).add_unchecked(&self.im.scale(s.re)),
        }
    }

    /// Complex conjugation `x + iy ↦ x − iy`.
    pub fn conj(&self) -> ComplexElement {
        Self { re: self.re.clone(), im: self.im.scale(-1.0) }
    }

    /// Complex-bilinear Jordan product.
    pub fn jordan_mul(&self, o: &ComplexElement) -> Result<ComplexElement> {
        self.algebra().check_same(&o.algebra())?;
        Ok(self.mul_unchecked(o))
    }

    fn mul_unchecked(&self, o: &ComplexElement) -> ComplexElement {
        let ac = self.re.mul_unchecked(&o.re);
        let bd = self.im.mul_unchecked(&o.im);
        let ad = self.re.mul_unchecked(&o.im);
        let bc = self.im.mul_unchecked(&o.re);
        Self { re: ac.add_unchecked(&bd.scale(-1.0)), im: ad.add_unchecked(&bc) }
    }

    pub fn square(&self) -> ComplexElement {
        self.mul_unchecked(self)
    }

    pub fn trace(&self) -> Complex64 {
        Complex64::new(self.re.trace(), self.im.trace())
    }

    /// Complex-bilinear `(z|w)`.
    pub fn inner(&self, o: &ComplexElement) -> Result<Complex64> {
        self.algebra().check_same(&o.algebra())?;
        Ok(self.to_coords().iter().zip(o.to_coords()).map(|(a, b)| a * b).sum())
    }

    /// Polynomial extension of `det`.
    pub fn det(&self) -> Complex64 {
        match self.algebra().family() {
            Family::Spin => {
                let (t, u) = self.spin_parts().expect("spin storage");
                t * t - u.iter().map(|z| z * z).sum::<Complex64>()
            }
            _ => linalg::cdet(&self.to_cmatrix().expect("matrix storage")),
        }
    }

    pub fn inverse(&self) -> Result<ComplexElement> {
        let det = self.det();
        let scale = linalg::norm(&self.re.to_coords())
            .hypot(linalg::norm(&self.im.to_coords()))
            .max(f64::MIN_POSITIVE)
            .powi(self.algebra().rank() as i32);
        if !(det.norm() > super::element::SINGULAR_TOL * scale) {
            return Err(Error::Singular { det: det.norm() });
        }
        let alg = self.algebra();
        match alg.family() {
            Family::Spin => {
                let (t, u) = self.spin_parts().expect("spin storage");
                let u: Vec<Complex64> = u.iter().map(|z| -z / det).collect();
                Self::from_spin_parts(alg, t / det, &u)
            }
            _ => {
                let inv = linalg::cinverse(&self.to_cmatrix().expect("matrix storage"))
                    .ok_or(Error::Singular { det: det.norm() })?;
                Self::from_cmatrix(alg, &inv)
            }
        }
    }

    /// `L(z) = L(x) + iL(y)`.
    pub fn mul_op(&self) -> ComplexLinOp {
        let a = self.re.mul_op().into_matrix();
        let b = self.im.mul_op().into_matrix();
        ComplexLinOp::from_matrix_unchecked(self.algebra(), CMatrix::from_parts(&a, &b))
    }

    /// `P(z) = 2L(z)² − L(z²)`.
    pub fn quad_rep(&self) -> ComplexLinOp {
        let l = self.mul_op().into_matrix();
        let l2 = self.square().mul_op().into_matrix();
        let p = l.matmul(&l).scale(Complex64::new(2.0, 0.0)).sub(&l2);
        ComplexLinOp::from_matrix_unchecked(self.algebra(), p)
    }

    /// `P(z)` assembled column by column from [`ComplexElement::quad_apply`].
    pub fn quad_rep_direct(&self) -> ComplexLinOp {
        let alg = self.algebra();
        let n = alg.dim();
        let mut m = CMatrix::zeros(n, n);
        for k in 0..n {
            let b = ComplexElement::from_real(Element::basis(alg, k));
            let col = self.quad_apply(&b).expect("same algebra").to_coords();
            for (i, c) in col.into_iter().enumerate() {
                m[(i, k)] = c;
            }
        }
        ComplexLinOp::from_matrix_unchecked(alg, m)
    }

    /// `P(z)v` in closed form: `zvz` for matrices, `2⟨z,v⟩z − det(z)v̄` for spin.
    pub fn quad_apply(&self, v: &ComplexElement) -> Result<ComplexElement> {
        let alg = self.algebra();
        alg.check_same(&v.algebra())?;
        match alg.family() {
            Family::Spin => {
                let (t, u) = self.spin_parts().expect("spin storage");
                let (s, w) = v.spin_parts().expect("spin storage");
                let ip = t * s + u.iter().zip(&w).map(|(a, b)| a * b).sum::<Complex64>();
                let det = self.det();
                let nu: Vec<Complex64> = u.iter().zip(&w).map(|(a, b)| ip * a * 2.0 + det * b).collect();
                Self::from_spin_parts(alg, ip * t * 2.0 - det * s, &nu)
            }
            _ => {
                let z = self.to_cmatrix().expect("matrix storage");
                let m = v.to_cmatrix().expect("matrix storage");
                Self::from_cmatrix(alg, &z.matmul(&m).matmul(&z))
            }
        }
    }

    /// Spectral norm: largest singular value of `X + iY` for matrix families,
    /// `λ_max(P(z)P(z̄))^{1/4}` in general (`P(z̄) = P(z)*`).
    pub fn spectral_norm(&self) -> Result<f64> {
        match self.algebra().family() {
            Family::Spin => {
                let p = self.quad_rep().into_matrix();
                let pp = p.matmul(&p.adjoint());
                let (vals, _) = linalg::hermitian_eigen(&pp)?;
                Ok(vals[0].max(0.0).powf(0.25))
            }
            _ => {
                let a = self.to_cmatrix().expect("matrix storage");
                let (vals, _) = linalg::hermitian_eigen(&a.adjoint().matmul(&a))?;
                Ok(vals[0].max(0.0).sqrt())
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(alg: Algebra, seed: f64) -> ComplexElement {
        let n = alg.dim();
        let c: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new((seed + k as f64 * 1.3).sin(), (seed * 2.0 + k as f64 * 0.7).cos()))
            .collect();
        ComplexElement::from_coords(alg, &c).unwrap()
    }

    #[test]
    fn product_is_bilinear_extension() {
        for alg in [Algebra::sym(3).unwrap(), Algebra::herm(2).unwrap(), Algebra::spin(4).unwrap()] {
            let z = sample(alg, 0.3);
            let w = sample(alg, 1.1);
            let zw = z.jordan_mul(&w).unwrap();
            let lz = z.mul_op();
            let via_op = lz.apply(&w).unwrap();
            assert!(zw.sub(&via_op).unwrap().to_coords().iter().all(|c| c.norm() < 1e-13));
            let iz = z.scale(Complex64::new(0.0, 1.0));
            let lhs = iz.jordan_mul(&w).unwrap();
            let rhs = zw.scale(Complex64::new(0.0, 1.0));
            assert!(lhs.sub(&rhs).unwrap().to_coords().iter().all(|c| c.norm() < 1e-13));
        }
    }

    #[test]
    fn inverse_and_det() {
        for alg in [Algebra::sym(3).unwrap(), Algebra::herm(3).unwrap(), Algebra::spin(5).unwrap()] {
            let z = sample(alg, 0.7).add(&ComplexElement::identity(alg).scale(Complex64::new(2.0, 0.0))).unwrap();
            let zi = z.inverse().unwrap();
            let e = z.jordan_mul(&zi).unwrap().sub(&ComplexElement::identity(alg)).unwrap();
            assert!(e.to_coords().iter().all(|c| c.norm() < 1e-12));
            let pz = z.quad_apply(&zi).unwrap().sub(&z).unwrap();
            assert!(pz.to_coords().iter().all(|c| c.norm() < 1e-12));
            assert!((z.det() * zi.det() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn quad_rep_matches_closed_form() {
        for alg in [Algebra::sym(3).unwrap(), Algebra::herm(3).unwrap(), Algebra::spin(6).unwrap()] {
            let z = sample(alg, 0.2);
            let v = sample(alg, 2.5);
            let a = z.quad_rep().apply(&v).unwrap();
            let direct = z.quad_rep_direct().into_matrix();
            assert!(direct.sub(z.quad_rep().as_matrix()).max_abs() < 1e-12);
            let b = z.quad_apply(&v).unwrap();
            assert!(a.sub(&b).unwrap().to_coords().iter().all(|c| c.norm() < 1e-12));
        }
    }

    #[test]
    fn spectral_norm_agrees_across_formulas() {
        let alg = Algebra::herm(3).unwrap();
        let z = sample(alg, 0.9);
        let p = z.quad_rep().into_matrix();
        let (vals, _) = linalg::hermitian_eigen(&p.matmul(&p.adjoint())).unwrap();
        assert_relative_eq!(z.spectral_norm().unwrap(), vals[0].powf(0.25), max_relative = 1e-10);
        let e = ComplexElement::identity(Algebra::spin(5).unwrap()).scale(Complex64::new(0.0, 0.5));
        assert_relative_eq!(e.spectral_norm().unwrap(), 0.5, epsilon = 1e-12);
    }
}
