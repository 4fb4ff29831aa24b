use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;
use num_traits::Zero;

use super::{Algebra, Family, LinOp};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Matrix};

/// Relative scale below which an eigenvalue counts as zero.
pub const RANK_TOL: f64 = 1e-10;
/// Relative scale of `|det|` below which an element is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-14;
/// Idempotency defect accepted by [`Element::peirce_projectors`].
pub const IDEMPOTENT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Storage {
    Sym(Matrix),
    Herm(CMatrix),
    Spin { t: f64, u: Vec<f64> },
}

/// A point of a simple Euclidean Jordan algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    alg: Algebra,
    data: Storage,
}

/// `x = Σ λᵢ cᵢ` with `λ₁ ≥ … ≥ λ_r` and a Jordan frame `c₁, …, c_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub frame: Vec<Element>,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> Element {
        let alg = self.frame[0].alg;
        self.eigenvalues.iter().zip(&self.frame).fold(Element::zero(alg), |acc, (l, c)| acc.add_unchecked(&c.scale(*l)))
    }
}

impl Element {
    pub fn zero(alg: Algebra) -> Self {
        let r = alg.rank();
        let data = match alg.family() {
            Family::SymR => Storage::Sym(Matrix::zeros(r, r)),
            Family::HermC => Storage::Herm(CMatrix::zeros(r, r)),
            Family::Spin => Storage::Spin { t: 0.0, u: vec![0.0; alg.dim() - 1] },
        };
        Self { alg, data }
    }

    /// The unit `e`.
    pub fn identity(alg: Algebra) -> Self {
        let r = alg.rank();
        let data = match alg.family() {
            Family::SymR => Storage::Sym(Matrix::identity(r)),
            Family::HermC => Storage::Herm(CMatrix::identity(r)),
            Family::Spin => Storage::Spin { t: 1.0, u: vec![0.0; alg.dim() - 1] },
        };
        Self { alg, data }
    }

    /// Real symmetric matrix element; symmetry is checked exactly.
    pub fn from_sym(alg: Algebra, m: Matrix) -> Result<Self> {
        if alg.family() != Family::SymR {
            return Err(Error::Unsupported("from_sym needs a real symmetric family"));
        }
        let r = alg.rank();
        if m.rows() != r || m.cols() != r || m.asymmetry() != 0.0 || !m.is_finite() {
            return Err(Error::Storage);
        }
        Ok(Self { alg, data: Storage::Sym(m) })
    }

    /// Complex Hermitian matrix element; Hermiticity is checked exactly.
    pub fn from_herm(alg: Algebra, m: CMatrix) -> Result<Self> {
        if alg.family() != Family::HermC {
            return Err(Error::Unsupported("from_herm needs a complex Hermitian family"));
        }
        let r = alg.rank();
        if m.rows() != r || m.cols() != r || !is_exactly_hermitian(&m) || !m.is_finite() {
            return Err(Error::Storage);
        }
        Ok(Self { alg, data: Storage::Herm(m) })
    }

    /// Spin factor element `(t, u)` with `u ∈ R^{n−1}`.
    pub fn from_spin(alg: Algebra, t: f64, u: Vec<f64>) -> Result<Self> {
        if alg.family() != Family::Spin {
            return Err(Error::Unsupported("from_spin needs a spin factor"));
        }
        if u.len() != alg.dim() - 1 {
            return Err(Error::CoordinateLength { expected: alg.dim() - 1, found: u.len() });
        }
        Ok(Self { alg, data: Storage::Spin { t, u } })
    }

    /// Element with the given orthonormal coordinates (see [`Element::to_coords`]).
    pub fn from_coords(alg: Algebra, c: &[f64]) -> Result<Self> {
        let n = alg.dim();
        if c.len() != n {
            return Err(Error::CoordinateLength { expected: n, found: c.len() });
        }
        let r = alg.rank();
        let data = match alg.family() {
            Family::SymR => {
                let mut m = Matrix::zeros(r, r);
                for i in 0..r {
                    m[(i, i)] = c[i];
                }
                let mut k = r;
                for i in 0..r {
                    for j in i + 1..r {
                        let v = c[k] / SQRT_2;
                        m[(i, j)] = v;
                        m[(j, i)] = v;
                        k += 1;
                    }
                }
                Storage::Sym(m)
            }
            Family::HermC => {
                let mut m = CMatrix::zeros(r, r);
                for i in 0..r {
                    m[(i, i)] = Complex64::new(c[i], 0.0);
                }
                let mut k = r;
                for i in 0..r {
                    for j in i + 1..r {
                        let v = Complex64::new(c[k], c[k + 1]) / SQRT_2;
                        m[(i, j)] = v;
                        m[(j, i)] = v.conj();
                        k += 2;
                    }
                }
                Storage::Herm(m)
            }
            Family::Spin => Storage::Spin { t: c[0] / SQRT_2, u: c[1..].iter().map(|v| v / SQRT_2).collect() },
        };
        Ok(Self { alg, data })
    }

    /// Coordinates in the frozen orthonormal basis of `(x|y) = tr(x∘y)`.
    ///
    /// * symr: `x₁₁, …, x_rr`, then `√2·x_ij` for `i < j` in row-major order.
    /// * hermc: `x₁₁, …, x_rr`, then for each `i < j` in row-major order the
    ///   pair `√2·Re x_ij, √2·Im x_ij`.
    /// * spin: `√2·t, √2·u₁, …, √2·u_{n−1}`.
    pub fn to_coords(&self) -> Vec<f64> {
        let r = self.alg.rank();
        match &self.data {
            Storage::Sym(m) => {
                let mut c: Vec<f64> = (0..r).map(|i| m[(i, i)]).collect();
                for i in 0..r {
                    for j in i + 1..r {
                        c.push(SQRT_2 * m[(i, j)]);
                    }
                }
                c
            }
            Storage::Herm(m) => {
                let mut c: Vec<f64> = (0..r).map(|i| m[(i, i)].re).collect();
                for i in 0..r {
                    for j in i + 1..r {
                        c.push(SQRT_2 * m[(i, j)].re);
                        c.push(SQRT_2 * m[(i, j)].im);
                    }
                }
                c
            }
            Storage::Spin { t, u } => core::iter::once(SQRT_2 * t).chain(u.iter().map(|v| SQRT_2 * v)).collect(),
        }
    }

    /// The `k`-th orthonormal basis element.
    pub fn basis(alg: Algebra, k: usize) -> Self {
        let mut c = vec![0.0; alg.dim()];
        c[k] = 1.0;
        Self::from_coords(alg, &c).expect("basis index within dimension")
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn as_sym(&self) -> Option<&Matrix> {
        match &self.data {
            Storage::Sym(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_herm(&self) -> Option<&CMatrix> {
        match &self.data {
            Storage::Herm(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_spin(&self) -> Option<(f64, &[f64])> {
        match &self.data {
            Storage::Spin { t, u } => Some((*t, u)),
            _ => None,
        }
    }

    /// Matrix families as a complex r×r matrix.
    pub fn to_cmatrix(&self) -> Option<CMatrix> {
        match &self.data {
            Storage::Sym(m) => Some(m.to_complex()),
            Storage::Herm(m) => Some(m.clone()),
            Storage::Spin { .. } => None,
        }
    }

    pub(crate) fn from_storage(alg: Algebra, data: Storage) -> Self {
        Self { alg, data }
    }

    pub fn is_finite(&self) -> bool {
        match &self.data {
            Storage::Sym(m) => m.is_finite(),
            Storage::Herm(m) => m.is_finite(),
            Storage::Spin { t, u } => t.is_finite() && u.iter().all(|v| v.is_finite()),
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.alg.check_same(&other.alg)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.alg.check_same(&other.alg)?;
        Ok(self.add_unchecked(&other.scale(-1.0)))
    }

    pub(crate) fn add_unchecked(&self, other: &Element) -> Element {
        let data = match (&self.data, &other.data) {
            (Storage::Sym(a), Storage::Sym(b)) => Storage::Sym(a.add(b)),
            (Storage::Herm(a), Storage::Herm(b)) => Storage::Herm(a.add(b)),
            (Storage::Spin { t, u }, Storage::Spin { t: s, u: v }) => {
                Storage::Spin { t: t + s, u: u.iter().zip(v).map(|(a, b)| a + b).collect() }
            }
            _ => unreachable!("algebras were checked"),
        };
        Element { alg: self.alg, data }
    }

    pub fn scale(&self, s: f64) -> Element {
        let data = match &self.data {
            Storage::Sym(a) => Storage::Sym(a.scale(s)),
            Storage::Herm(a) => Storage::Herm(a.scale(Complex64::new(s, 0.0))),
            Storage::Spin { t, u } => Storage::Spin { t: s * t, u: u.iter().map(|v| s * v).collect() },
        };
        Element { alg: self.alg, data }
    }

    /// `x + s·e`.
    pub fn shift(&self, s: f64) -> Element {
        self.add_unchecked(&Element::identity(self.alg).scale(s))
    }

    /// Jordan product: `(xy + yx)/2` for matrices, `(ts + u·v, tv + su)` for spin.
    pub fn jordan_mul(&self, other: &Element) -> Result<Element> {
        self.alg.check_same(&other.alg)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Element) -> Element {
        let data = match (&self.data, &other.data) {
            (Storage::Sym(a), Storage::Sym(b)) => {
                let p = a.matmul(b);
                Storage::Sym(Matrix::from_fn(p.rows(), p.cols(), |i, j| 0.5 * (p[(i, j)] + p[(j, i)])))
            }
            (Storage::Herm(a), Storage::Herm(b)) => Storage::Herm(a.matmul(b).hermitian_part()),
            (Storage::Spin { t, u }, Storage::Spin { t: s, u: v }) => {
                Storage::Spin { t: t * s + linalg::dot(u, v), u: u.iter().zip(v).map(|(a, b)| t * b + s * a).collect() }
            }
            _ => unreachable!("algebras were checked"),
        };
        Element { alg: self.alg, data }
    }

    pub fn square(&self) -> Element {
        self.mul_unchecked(self)
    }

    pub fn trace(&self) -> f64 {
        match &self.data {
            Storage::Sym(m) => m.trace(),
            Storage::Herm(m) => m.trace().re,
            Storage::Spin { t, .. } => 2.0 * t,
        }
    }

    pub fn det(&self) -> f64 {
        match &self.data {
            Storage::Sym(m) => linalg::det(m),
            Storage::Herm(m) => linalg::cdet(m).re,
            Storage::Spin { t, u } => t * t - linalg::dot(u, u),
        }
    }

    /// Trace form `(x|y) = tr(x∘y)`.
    pub fn inner(&self, other: &Element) -> Result<f64> {
        self.alg.check_same(&other.alg)?;
        Ok(linalg::dot(&self.to_coords(), &other.to_coords()))
    }

    /// `‖x‖ = (x|x)^{1/2}`.
    pub fn norm(&self) -> f64 {
        linalg::norm(&self.to_coords())
    }

    /// Jordan inverse, so that `x∘x⁻¹ = e` and `P(x)x⁻¹ = x`.
    pub fn inverse(&self) -> Result<Element> {
        let det = self.det();
        let scale = self.norm().max(f64::MIN_POSITIVE).powi(self.alg.rank() as i32);
        if !(det.abs() > SINGULAR_TOL * scale) {
            return Err(Error::Singular { det });
        }
        let data = match &self.data {
            Storage::Sym(m) => Storage::Sym(linalg::inverse(m).ok_or(Error::Singular { det })?.symmetrized()),
            Storage::Herm(m) => Storage::Herm(linalg::cinverse(m).ok_or(Error::Singular { det })?.hermitian_part()),
            Storage::Spin { t, u } => Storage::Spin { t: t / det, u: u.iter().map(|v| -v / det).collect() },
        };
        Ok(Element { alg: self.alg, data })
    }

    /// Spectral decomposition with eigenvalues in descending order.
    pub fn spectral(&self) -> Result<SpectralDecomposition> {
        let r = self.alg.rank();
        match &self.data {
            Storage::Sym(m) => {
                let (vals, v) = linalg::symmetric_eigen(m)?;
                let frame = (0..r)
                    .map(|k| {
                        let c = Matrix::from_fn(r, r, |i, j| v[(i, k)] * v[(j, k)]);
                        Element { alg: self.alg, data: Storage::Sym(c) }
                    })
                    .collect();
                Ok(SpectralDecomposition { eigenvalues: vals, frame })
            }
            Storage::Herm(m) => {
                let (vals, v) = linalg::hermitian_eigen(m)?;
                let frame = (0..r)
                    .map(|k| {
                        let c = CMatrix::from_fn(r, r, |i, j| v[(i, k)] * v[(j, k)].conj()).hermitian_part();
                        Element { alg: self.alg, data: Storage::Herm(c) }
                    })
                    .collect();
                Ok(SpectralDecomposition { eigenvalues: vals, frame })
            }
            Storage::Spin { t, u } => {
                let nu = linalg::norm(u);
                let dir: Vec<f64> = if nu > 0.0 {
                    u.iter().map(|v| v / nu).collect()
                } else {
                    let mut e1 = vec![0.0; u.len()];
                    e1[0] = 1.0;
                    e1
                };
                let c = |sign: f64| Element {
                    alg: self.alg,
                    data: Storage::Spin { t: 0.5, u: dir.iter().map(|v| 0.5 * sign * v).collect() },
                };
                Ok(SpectralDecomposition { eigenvalues: vec![t + nu, t - nu], frame: vec![c(1.0), c(-1.0)] })
            }
        }
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        match &self.data {
            Storage::Spin { t, u } => {
                let nu = linalg::norm(u);
                Ok(vec![t + nu, t - nu])
            }
            _ => Ok(self.spectral()?.eigenvalues),
        }
    }

    /// `Σ f(λᵢ) cᵢ`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Element> {
        let sd = self.spectral()?;
        Ok(sd
            .eigenvalues
            .iter()
            .zip(&sd.frame)
            .fold(Element::zero(self.alg), |acc, (l, c)| acc.add_unchecked(&c.scale(f(*l)))))
    }

    /// Square root of a point of the closed cone.
    pub fn sqrt(&self) -> Result<Element> {
        self.require_closure()?;
        self.map_spectrum(|l| l.max(0.0).sqrt())
    }

    /// Multiplication operator `L(x)` in orthonormal coordinates.
    pub fn mul_op(&self) -> LinOp {
        let n = self.alg.dim();
        let cols: Vec<Vec<f64>> =
            (0..n).map(|k| self.mul_unchecked(&Element::basis(self.alg, k)).to_coords()).collect();
        LinOp::from_matrix_unchecked(self.alg, Matrix::from_columns(&cols))
    }

    /// Quadratic representation `P(x) = 2L(x)² − L(x²)`.
    pub fn quad_rep(&self) -> LinOp {
        let l = self.mul_op().into_matrix();
        let l2 = self.square().mul_op().into_matrix();
        let p = l.matmul(&l).scale(2.0).sub(&l2);
        LinOp::from_matrix_unchecked(self.alg, p.symmetrized())
    }

    /// `P(x)v` from the closed forms `xvx` (matrices) and
    /// `2⟨x,v⟩x − det(x)·v̄` (spin, with `⟨x,v⟩ = ts + u·w` and `v̄ = (s, −w)`).
    pub fn quad_apply(&self, v: &Element) -> Result<Element> {
        self.alg.check_same(&v.alg)?;
        let data = match (&self.data, &v.data) {
            (Storage::Sym(x), Storage::Sym(y)) => Storage::Sym(x.matmul(y).matmul(x).symmetrized()),
            (Storage::Herm(x), Storage::Herm(y)) => Storage::Herm(x.matmul(y).matmul(x).hermitian_part()),
            (Storage::Spin { t, u }, Storage::Spin { t: s, u: w }) => {
                let ip = t * s + linalg::dot(u, w);
                let det = self.det();
                Storage::Spin {
                    t: 2.0 * ip * t - det * s,
                    u: u.iter().zip(w).map(|(a, b)| 2.0 * ip * a + det * b).collect(),
                }
            }
            _ => unreachable!("algebras were checked"),
        };
        Ok(Element { alg: self.alg, data })
    }

    /// `p_y v = (v|y) y`.
    pub fn rank_one(&self) -> LinOp {
        let c = self.to_coords();
        let n = c.len();
        LinOp::from_matrix_unchecked(self.alg, Matrix::from_fn(n, n, |i, j| c[i] * c[j]))
    }

    /// `Δ_k(x)` relative to the canonical frame: the leading k×k minor for
    /// matrix families; for spin, `Δ₁ = t + u₁` and `Δ₂ = det`.
    pub fn principal_minor(&self, k: usize) -> Result<f64> {
        let r = self.alg.rank();
        if k < 1 || k > r {
            return Err(Error::OutOfRange { what: "k", value: k as i64, lo: 1, hi: r as i64 });
        }
        Ok(match &self.data {
            Storage::Sym(m) => linalg::det(&Matrix::from_fn(k, k, |i, j| m[(i, j)])),
            Storage::Herm(m) => linalg::cdet(&m.block(0, 0, k, k)).re,
            Storage::Spin { t, u } => {
                if k == 1 {
                    t + u[0]
                } else {
                    self.det()
                }
            }
        })
    }

    /// The canonical frame idempotent `c_k` (1-based), the one `principal_minor` is built on.
    pub fn canonical_idempotent(alg: Algebra, k: usize) -> Element {
        assert!(k >= 1 && k <= alg.rank(), "frame index out of range");
        match alg.family() {
            Family::Spin => {
                let mut u = vec![0.0; alg.dim() - 1];
                u[0] = if k == 1 { 0.5 } else { -0.5 };
                Element::from_spin(alg, 0.5, u).expect("spin shape")
            }
            _ => {
                let mut c = vec![0.0; alg.dim()];
                c[k - 1] = 1.0;
                Element::from_coords(alg, &c).expect("coordinate shape")
            }
        }
    }

    /// `c₁ + ⋯ + c_k` in the canonical frame.
    pub fn canonical_partial_unit(alg: Algebra, k: usize) -> Element {
        (1..=k).fold(Element::zero(alg), |acc, j| acc.add_unchecked(&Element::canonical_idempotent(alg, j)))
    }

    /// Generalised power `Δ_s(x) = Δ₁^{s₁−s₂} ⋯ Δ_r^{s_r}` for `x ∈ Ω`.
    pub fn delta_power(&self, s: &[Complex64]) -> Result<Complex64> {
        let r = self.alg.rank();
        if s.len() != r {
            return Err(Error::CoordinateLength { expected: r, found: s.len() });
        }
        self.require_cone()?;
        let mut log = Complex64::zero();
        for k in 1..=r {
            let next = if k < r { s[k] } else { Complex64::zero() };
            let minor = self.principal_minor(k)?;
            if !(minor > 0.0) {
                return Err(Error::NotInCone { min_eigenvalue: minor });
            }
            log += (s[k - 1] - next) * minor.ln();
        }
        Ok(log.exp())
    }

    /// Peirce projectors onto `J(c,1)`, `J(c,1/2)`, `J(c,0)` for an idempotent `c`.
    pub fn peirce_projectors(&self) -> Result<(LinOp, LinOp, LinOp)> {
        let defect = self.square().add_unchecked(&self.scale(-1.0)).norm();
        if !(defect <= IDEMPOTENT_TOL * (1.0 + self.norm())) {
            return Err(Error::NotIdempotent { defect });
        }
        let n = self.alg.dim();
        let l = self.mul_op().into_matrix();
        let l2 = l.matmul(&l);
        let id = Matrix::identity(n);
        // Lagrange interpolation on the spectrum {1, 1/2, 0} of L(c)
        let one = l2.scale(2.0).sub(&l);
        let half = l.scale(4.0).sub(&l2.scale(4.0));
        let zero = l2.scale(2.0).sub(&l.scale(3.0)).add(&id);
        Ok((
            LinOp::from_matrix_unchecked(self.alg, one.symmetrized()),
            LinOp::from_matrix_unchecked(self.alg, half.symmetrized()),
            LinOp::from_matrix_unchecked(self.alg, zero.symmetrized()),
        ))
    }

    fn spectral_tol(&self) -> f64 {
        RANK_TOL * (1.0 + self.norm())
    }

    /// Number of eigenvalues with `|λ| > 1e−10·(1 + ‖x‖)`.
    pub fn rank_of(&self) -> Result<usize> {
        let tol = self.spectral_tol();
        Ok(self.eigenvalues()?.iter().filter(|l| l.abs() > tol).count())
    }

    pub fn in_cone(&self) -> Result<bool> {
        let tol = self.spectral_tol();
        Ok(self.eigenvalues()?.iter().all(|&l| l > tol))
    }

    pub fn in_closure(&self) -> Result<bool> {
        let tol = self.spectral_tol();
        Ok(self.eigenvalues()?.iter().all(|&l| l > -tol))
    }

    pub(crate) fn require_cone(&self) -> Result<()> {
        let vals = self.eigenvalues()?;
        let min = vals[vals.len() - 1];
        if min > self.spectral_tol() {
            Ok(())
        } else {
            Err(Error::NotInCone { min_eigenvalue: min })
        }
    }

    pub(crate) fn require_closure(&self) -> Result<()> {
        let vals = self.eigenvalues()?;
        let min = vals[vals.len() - 1];
        if min > -self.spectral_tol() {
            Ok(())
        } else {
            Err(Error::NotInClosure { min_eigenvalue: min })
        }
    }

    /// The two degree-2 invariants `p₂₀ = (d/2)(tr x)² + tr(x²)` and
    /// `p₁₁ = (tr x)² − tr(x²)`.
    pub fn invariant_polys(&self) -> (f64, f64) {
        let tr = self.trace();
        let tr2 = linalg::dot(&self.to_coords(), &self.to_coords());
        (self.alg.half_d() * tr * tr + tr2, tr * tr - tr2)
    }
}

fn is_exactly_hermitian(m: &CMatrix) -> bool {
    (0..m.rows()).all(|i| (0..m.cols()).all(|j| m[(i, j)] == m[(j, i)].conj()))
}
