//! The tube domain `T_Ω = J + iΩ`, the kernel `Q_μ(z,w)`, block Gram
//! matrices and the witness search for non-positive kernels.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jordan::{random, Algebra, ComplexElement, ComplexLinOp, Element, Family, LinOp};
use crate::linalg::{self, CMatrix};

/// Minimum `det Im z` for generated witness points.
pub const MIN_DET_IM: f64 = 1e-6;

/// A point `z = x + iy` with `y ∈ Ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct TubePoint {
    z: ComplexElement,
}

impl TubePoint {
    pub fn new(z: ComplexElement) -> Result<Self> {
        if !z.im().in_cone()? {
            return Err(Error::NotInTube);
        }
        Ok(Self { z })
    }

    pub fn from_parts(x: Element, y: Element) -> Result<Self> {
        Self::new(ComplexElement::new(x, y)?)
    }

    /// `ie`.
    pub fn i_e(alg: Algebra) -> Self {
        Self { z: ComplexElement::imaginary(Element::identity(alg)) }
    }

    pub fn algebra(&self) -> Algebra {
        self.z.algebra()
    }

    pub fn as_complex(&self) -> &ComplexElement {
        &self.z
    }

    pub fn re(&self) -> &Element {
        self.z.re()
    }

    pub fn im(&self) -> &Element {
        self.z.im()
    }

    /// `2n` reals: coordinates of `Re z` followed by those of `Im z`.
    pub fn to_coords(&self) -> Vec<f64> {
        let mut c = self.z.re().to_coords();
        c.extend(self.z.im().to_coords());
        c
    }

    pub fn from_coords(alg: Algebra, c: &[f64]) -> Result<Self> {
        let n = alg.dim();
        if c.len() != 2 * n {
            return Err(Error::CoordinateLength { expected: 2 * n, found: c.len() });
        }
        Self::from_parts(Element::from_coords(alg, &c[..n])?, Element::from_coords(alg, &c[n..])?)
    }
}

/// `(z − w̄)/2i`, whose real part `(Im z + Im w)/2` lies in `Ω`.
pub fn u_point(z: &TubePoint, w: &TubePoint) -> ComplexElement {
    // (z − w̄)/2i = (y₁ + y₂)/2 + i(x₂ − x₁)/2
    let re = z.im().add(w.im()).expect("same algebra").scale(0.5);
    let im = w.re().sub(z.re()).expect("same algebra").scale(0.5);
    ComplexElement::new(re, im).expect("same algebra")
}

/// Which branch computation [`log_det_tube`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LogDetMethod {
    /// Congruence to `e + iS` and principal logs of `1 + isⱼ`.
    Spectral,
    /// Phase tracking of `det(X + isY)` along `s ∈ [0, 1]`.
    Continuation,
}

impl LogDetMethod {
    /// Spectral for matrix families, continuation for spin factors.
    pub fn default_for(alg: &Algebra) -> Self {
        match alg.family() {
            Family::Spin => LogDetMethod::Continuation,
            _ => LogDetMethod::Spectral,
        }
    }
}

/// The continuous logarithm of `det u` on `{Re u ∈ Ω}` that is real on `Ω`.
///
/// With `X = Re u`, `Y = Im u` and `S = P(X^{−1/2})Y`, `u = P(X^{1/2})(e + iS)`
/// so `log det u = ln det X + Σ Log(1 + isⱼ)` over the eigenvalues of `S`.
/// Each factor stays in the right half plane, so principal logs are continuous.
pub fn log_det_spectral(u: &ComplexElement) -> Result<Complex64> {
    let x = u.re();
    x.require_cone()?;
    let x_isqrt = x.map_spectrum(|l| 1.0 / l.sqrt())?;
    let s = x_isqrt.quad_apply(u.im())?;
    let mut acc = Complex64::new(x.det().ln(), 0.0);
    for sj in s.eigenvalues()? {
        acc += Complex64::new(1.0, sj).ln();
    }
    Ok(acc)
}

/// Step-count cap for [`log_det_continuation`].
pub const CONTINUATION_MAX_STEPS: usize = 1 << 16;

/// Same determination as [`log_det_spectral`], found by following
/// `s ↦ det(X + isY)` from `s = 0` and summing the per-step phase changes.
/// Steps are halved until the phase moves by less than π/4 and the modulus by
/// less than a factor 2.
pub fn log_det_continuation(u: &ComplexElement) -> Result<Complex64> {
    let x = u.re();
    x.require_cone()?;
    let at = |s: f64| -> Complex64 { ComplexElement::new(x.clone(), u.im().scale(s)).expect("same algebra").det() };
    let mut s = 0.0;
    let mut h: f64 = 0.125;
    let mut prev = Complex64::new(x.det(), 0.0);
    let mut phase = 0.0;
    let mut steps = 0;
    while s < 1.0 {
        steps += 1;
        if steps > CONTINUATION_MAX_STEPS {
            return Err(Error::NoConvergence { sweeps: steps, off_diagonal: 1.0 - s });
        }
        let t = (s + h).min(1.0);
        let cur = at(t);
        let q = cur / prev;
        let m = q.norm();
        if q.arg().abs() < PI / 4.0 && m < 2.0 && m > 0.5 {
            phase += q.arg();
            prev = cur;
            s = t;
            h *= 2.0;
        } else {
            h *= 0.5;
            if h < 1e-14 {
                return Err(Error::NoConvergence { sweeps: steps, off_diagonal: 1.0 - s });
            }
        }
    }
    Ok(Complex64::new(prev.norm().ln(), phase))
}

/// `log det((z − w̄)/2i)` with the default method for the family.
pub fn log_det_tube(z: &TubePoint, w: &TubePoint) -> Result<Complex64> {
    log_det_tube_with(z, w, LogDetMethod::default_for(&z.algebra()))
}

pub fn log_det_tube_with(z: &TubePoint, w: &TubePoint, method: LogDetMethod) -> Result<Complex64> {
    z.algebra().check_same(&w.algebra())?;
    let u = u_point(z, w);
    match method {
        LogDetMethod::Spectral => log_det_spectral(&u),
        LogDetMethod::Continuation => log_det_continuation(&u),
    }
}

/// `Q_μ(z,w) = exp(−μ log det u)·P(u)⁻¹` with `u = (z − w̄)/2i`.
pub fn kernel_q(mu: f64, z: &TubePoint, w: &TubePoint) -> Result<ComplexLinOp> {
    kernel_q_with(mu, z, w, LogDetMethod::default_for(&z.algebra()))
}

pub fn kernel_q_with(mu: f64, z: &TubePoint, w: &TubePoint, method: LogDetMethod) -> Result<ComplexLinOp> {
    let ld = log_det_tube_with(z, w, method)?;
    let u = u_point(z, w);
    let p = u.inverse()?.quad_rep_direct();
    Ok(p.scale((-mu * ld).exp()))
}

/// Relative tolerances for Gram verdicts.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GramTolerances {
    /// PSD when `λ_min ≥ −psd·max|λ|`.
    pub psd: f64,
    /// Witness when `λ_min < −witness·max|λ|`.
    pub witness: f64,
}

impl Default for GramTolerances {
    fn default() -> Self {
        Self { psd: 1e-9, witness: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Psd,
    Witness,
    /// Negative beyond the PSD tolerance but not beyond the witness threshold.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Strategy {
    /// Points scattered around `ie`.
    Cluster,
    /// Cayley images of ball points, each with its own real translation.
    Cayley,
    /// `ie` and `ie + εb_k` over the orthonormal basis.
    Jet1,
    /// Forward second-order stencil `ie + ε{0, b_k, b_k + b_l, 2b_k}`.
    Jet2,
    /// Caller-supplied points.
    Given,
}

/// Outcome of a block Gram test.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GramCertificate {
    pub algebra: Algebra,
    pub mu: f64,
    /// Points as `[coords(Re z), coords(Im z)]`.
    pub points: Vec<Vec<f64>>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `λ_min / max|λ|`.
    pub relative_min: f64,
    /// `‖M − M*‖_F / ‖M‖_F` before symmetrisation.
    pub hermitian_defect: f64,
    pub verdict: Verdict,
    pub witness_re: Option<Vec<f64>>,
    pub witness_im: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub configuration: Option<u64>,
    pub strategy: Strategy,
    pub refine_iterations: usize,
}

/// Assembles the `Nn × Nn` block matrix `[Q_μ(zᵢ, zⱼ)]` and returns it with
/// its relative Hermitian defect (before symmetrisation).
pub fn gram_matrix(mu: f64, points: &[TubePoint]) -> Result<(CMatrix, f64)> {
    if points.is_empty() {
        return Err(Error::Degenerate("gram needs at least one point"));
    }
    let alg = points[0].algebra();
    let n = alg.dim();
    let np = points.len();
    let mut m = CMatrix::zeros(np * n, np * n);
    for (i, zi) in points.iter().enumerate() {
        alg.check_same(&zi.algebra())?;
        for (j, zj) in points.iter().enumerate() {
            m.set_block(i * n, j * n, kernel_q(mu, zi, zj)?.as_matrix());
        }
    }
    let defect = m.hermitian_defect() / m.frobenius_norm().max(f64::MIN_POSITIVE);
    Ok((m.hermitian_part(), defect))
}

/// Gram matrix from the upper block triangle only (lower blocks by adjoint).
fn gram_matrix_upper(mu: f64, points: &[TubePoint]) -> Result<CMatrix> {
    let n = points[0].algebra().dim();
    let np = points.len();
    let mut m = CMatrix::zeros(np * n, np * n);
    for i in 0..np {
        for j in i..np {
            let q = kernel_q(mu, &points[i], &points[j])?.into_matrix();
            if j > i {
                m.set_block(j * n, i * n, &q.adjoint());
            }
            m.set_block(i * n, j * n, &q);
        }
    }
    Ok(m.hermitian_part())
}

fn certify(
    alg: Algebra,
    mu: f64,
    points: &[TubePoint],
    m: &CMatrix,
    defect: f64,
    tol: GramTolerances,
) -> Result<(GramCertificate, linalg::ExtremalEigen)> {
    let ext = linalg::hermitian_extremal(m)?;
    let scale = ext.max_abs.max(f64::MIN_POSITIVE);
    let rel = ext.min / scale;
    let verdict = if rel >= -tol.psd {
        Verdict::Psd
    } else if rel < -tol.witness {
        Verdict::Witness
    } else {
        Verdict::Inconclusive
    };
    let (wr, wi) = if verdict == Verdict::Witness {
        (Some(ext.min_vector.iter().map(|z| z.re).collect()), Some(ext.min_vector.iter().map(|z| z.im).collect()))
    } else {
        (None, None)
    };
    let cert = GramCertificate {
        algebra: alg,
        mu,
        points: points.iter().map(TubePoint::to_coords).collect(),
        min_eigenvalue: ext.min,
        max_eigenvalue: ext.max,
        relative_min: rel,
        hermitian_defect: defect,
        verdict,
        witness_re: wr,
        witness_im: wi,
        seed: None,
        configuration: None,
        strategy: Strategy::Given,
        refine_iterations: 0,
    };
    Ok((cert, ext))
}

/// Block Gram test of `Q_μ` on the given points.
pub fn gram(mu: f64, points: &[TubePoint], tol: GramTolerances) -> Result<GramCertificate> {
    let (m, defect) = gram_matrix(mu, points)?;
    Ok(certify(points[0].algebra(), mu, points, &m, defect, tol)?.0)
}

/// `c(w) = i(e + w)∘(e − w)⁻¹` for spectral norm `|w| < 1`.
pub fn cayley(w: &ComplexElement) -> Result<TubePoint> {
    let norm = w.spectral_norm()?;
    if !(norm < 1.0) {
        return Err(Error::CayleyDomain { norm });
    }
    let alg = w.algebra();
    let e = ComplexElement::identity(alg);
    let a = e.add(w)?;
    let b = e.sub(w)?.inverse()?;
    let z = a.jordan_mul(&b)?.scale(Complex64::new(0.0, 1.0));
    TubePoint::new(z)
}

/// `z + a` for real `a`.
pub fn translate(z: &TubePoint, a: &Element) -> Result<TubePoint> {
    let re = z.re().add(a)?;
    Ok(TubePoint { z: ComplexElement::new(re, z.im().clone())? })
}

/// `P(a)z` for `a ∈ Ω`.
pub fn act_quad(a: &Element, z: &TubePoint) -> Result<TubePoint> {
    a.require_cone()?;
    TubePoint::new(ComplexElement::new(a.quad_apply(z.re())?, a.quad_apply(z.im())?)?)
}

/// `−z⁻¹`.
pub fn invert(z: &TubePoint) -> Result<TubePoint> {
    TubePoint::new(z.as_complex().inverse()?.scale(Complex64::new(-1.0, 0.0)))
}

/// Derivative of `z ↦ −z⁻¹`, namely `P(z)⁻¹`.
pub fn jacobian_invert(z: &TubePoint) -> Result<ComplexLinOp> {
    z.as_complex().quad_rep().inverse()
}

/// `P(a)` as an operator, for covariance checks.
pub fn quad_op(a: &Element) -> LinOp {
    a.quad_rep()
}

/// Parameters of [`witness_search`].
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WitnessOptions {
    /// Number of drawn configurations.
    pub budget: u64,
    /// How many of the best non-witness configurations get refined.
    pub refine_top: usize,
    /// Gradient steps per refined configuration.
    pub refine_iterations: usize,
    pub tol: GramTolerances,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self { budget: 200, refine_top: 2, refine_iterations: 100, tol: GramTolerances::default() }
    }
}

/// Strategy used for configuration `index`.
pub fn strategy_for(alg: &Algebra, index: u64) -> Strategy {
    match index % 4 {
        0 => Strategy::Cluster,
        1 => Strategy::Cayley,
        2 => Strategy::Jet1,
        _ if alg.rank() >= 3 => Strategy::Jet2,
        _ => Strategy::Cluster,
    }
}

/// Per-configuration generator: stream `index` of the master seed.
pub fn configuration_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn acceptable_im(y: &Element) -> bool {
    y.in_cone().unwrap_or(false) && y.det() >= MIN_DET_IM
}

fn cluster_point<R: Rng + ?Sized>(alg: Algebra, eps: f64, rng: &mut R) -> TubePoint {
    let e = Element::identity(alg);
    for _ in 0..100 {
        let x = random::gaussian(alg, rng).scale(eps);
        let y = e.add(&random::gaussian(alg, rng).scale(eps)).expect("same algebra");
        if acceptable_im(&y) {
            return TubePoint::from_parts(x, y).expect("checked cone");
        }
    }
    TubePoint::from_parts(random::gaussian(alg, rng).scale(eps), e).expect("unit is in the cone")
}

fn cayley_point<R: Rng + ?Sized>(alg: Algebra, rng: &mut R) -> TubePoint {
    loop {
        let radius = 0.2 + 0.7 * rng.random::<f64>();
        let w = random::ball_point(alg, radius, rng);
        let shift = 0.5 * rng.random::<f64>();
        let a = random::gaussian(alg, rng).scale(shift);
        if let Ok(z) = cayley(&w).and_then(|z| translate(&z, &a)) {
            if acceptable_im(z.im()) {
                return z;
            }
        }
    }
}

fn stencil(alg: Algebra, eps: f64, second_order: bool) -> Vec<TubePoint> {
    let n = alg.dim();
    let mut offsets: Vec<Vec<f64>> = vec![vec![0.0; n]];
    let unit = |k: usize| {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        v
    };
    offsets.extend((0..n).map(unit));
    if second_order {
        for k in 0..n {
            for l in k + 1..n {
                let mut v = unit(k);
                v[l] = 1.0;
                offsets.push(v);
            }
        }
        offsets.extend((0..n).map(|k| {
            let mut v = vec![0.0; n];
            v[k] = 2.0;
            v
        }));
    }
    let e = Element::identity(alg);
    offsets
        .iter()
        .map(|o| {
            let x: Vec<f64> = o.iter().map(|c| eps * c).collect();
            TubePoint::from_parts(Element::from_coords(alg, &x).expect("length n"), e.clone())
                .expect("unit is in the cone")
        })
        .collect()
}

/// Deterministic point configuration number `index` for `master_seed`.
pub fn draw_configuration(alg: Algebra, master_seed: u64, index: u64) -> (Strategy, Vec<TubePoint>) {
    let mut rng = configuration_rng(master_seed, index);
    let strategy = strategy_for(&alg, index);
    let pts = match strategy {
        Strategy::Cluster => {
            let m = rng.random_range(2..=6);
            let eps = log_uniform(&mut rng, 0.02, 0.5);
            (0..m).map(|_| cluster_point(alg, eps, &mut rng)).collect()
        }
        Strategy::Cayley => {
            let m = rng.random_range(2..=6);
            (0..m).map(|_| cayley_point(alg, &mut rng)).collect()
        }
        Strategy::Jet1 => stencil(alg, log_uniform(&mut rng, 0.05, 0.3), false),
        Strategy::Jet2 => stencil(alg, 0.15 + 0.25 * rng.random::<f64>(), true),
        Strategy::Given => unreachable!("not drawn"),
    };
    (strategy, pts)
}

/// Gram certificate of configuration `index` (no refinement).
pub fn evaluate_configuration(
    alg: Algebra,
    mu: f64,
    master_seed: u64,
    index: u64,
    tol: GramTolerances,
) -> Result<GramCertificate> {
    let (strategy, pts) = draw_configuration(alg, master_seed, index);
    let m = gram_matrix_upper(mu, &pts)?;
    let (mut cert, _) = certify(alg, mu, &pts, &m, 0.0, tol)?;
    cert.seed = Some(master_seed);
    cert.configuration = Some(index);
    cert.strategy = strategy;
    Ok(cert)
}

fn params_to_points(alg: Algebra, p: &[Vec<f64>]) -> Option<Vec<TubePoint>> {
    let mut pts = Vec::with_capacity(p.len());
    for c in p {
        let n = alg.dim();
        let y = Element::from_coords(alg, &c[n..]).ok()?;
        if !acceptable_im(&y) {
            return None;
        }
        pts.push(TubePoint::from_parts(Element::from_coords(alg, &c[..n]).ok()?, y).ok()?);
    }
    Some(pts)
}

fn block_form(m: &CMatrix, a: &[Complex64], b: &[Complex64]) -> Complex64 {
    // a* M b
    let mb = m.matvec(b);
    a.iter().zip(&mb).map(|(x, y)| x.conj() * y).sum()
}

/// Gradient of `λ_min/λ_max` with respect to all point coordinates, by
/// forward differences of the affected block row and first-order
/// eigenvalue perturbation.
fn ratio_gradient(mu: f64, pts: &[TubePoint], ext: &linalg::ExtremalEigen) -> Result<Vec<Vec<f64>>> {
    const H: f64 = 1e-6;
    let alg = pts[0].algebra();
    let n = alg.dim();
    let np = pts.len();
    let seg = |v: &[Complex64], i: usize| v[i * n..(i + 1) * n].to_vec();
    let mut grad = vec![vec![0.0; 2 * n]; np];
    let base: Vec<Vec<CMatrix>> = (0..np)
        .map(|i| (0..np).map(|j| kernel_q(mu, &pts[i], &pts[j]).map(ComplexLinOp::into_matrix)).collect())
        .collect::<Result<_>>()?;
    for i in 0..np {
        let ci = pts[i].to_coords();
        for k in 0..2 * n {
            let mut cp = ci.clone();
            cp[k] += H;
            let zi = match TubePoint::from_coords(alg, &cp) {
                Ok(z) => z,
                Err(_) => continue,
            };
            let (mut dmin, mut dmax) = (0.0, 0.0);
            for j in 0..np {
                let q = if j == i { kernel_q(mu, &zi, &zi)? } else { kernel_q(mu, &zi, &pts[j])? };
                let db = q.into_matrix().sub(&base[i][j]).scale(Complex64::new(1.0 / H, 0.0));
                let w = if j == i { 1.0 } else { 2.0 };
                dmin += w * block_form(&db, &seg(&ext.min_vector, i), &seg(&ext.min_vector, j)).re;
                dmax += w * block_form(&db, &seg(&ext.max_vector, i), &seg(&ext.max_vector, j)).re;
            }
            grad[i][k] = (dmin * ext.max - ext.min * dmax) / (ext.max * ext.max);
        }
    }
    Ok(grad)
}

/// Normalised gradient descent on `λ_min/λ_max` over the point coordinates,
/// with backtracking (step ×1.5 on success, ÷2 on failure). Moves that take
/// an imaginary part out of the cone or below `det = 1e−6` are rejected.
pub fn refine(mu: f64, start: &GramCertificate, iterations: usize, tol: GramTolerances) -> Result<GramCertificate> {
    let alg = start.algebra;
    let mut params = start.points.clone();
    let mut pts = params_to_points(alg, &params).ok_or(Error::NotInTube)?;
    let m = gram_matrix_upper(mu, &pts)?;
    let (mut cert, mut ext) = certify(alg, mu, &pts, &m, 0.0, tol)?;
    let mut step = 0.05;
    let mut done = 0;
    for _ in 0..iterations {
        let g = ratio_gradient(mu, &pts, &ext)?;
        let gnorm = g.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        if !(gnorm > 0.0) {
            break;
        }
        let mut improved = false;
        while step >= 1e-8 {
            let trial: Vec<Vec<f64>> = params
                .iter()
                .zip(&g)
                .map(|(p, gi)| p.iter().zip(gi).map(|(a, b)| a - step * b / gnorm).collect())
                .collect();
            if let Some(tp) = params_to_points(alg, &trial) {
                let tm = gram_matrix_upper(mu, &tp)?;
                let (tc, te) = certify(alg, mu, &tp, &tm, 0.0, tol)?;
                if tc.relative_min < cert.relative_min {
                    params = trial;
                    pts = tp;
                    cert = tc;
                    ext = te;
                    step *= 1.5;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
        done += 1;
    }
    cert.seed = start.seed;
    cert.configuration = start.configuration;
    cert.strategy = start.strategy;
    cert.refine_iterations = start.refine_iterations + done;
    Ok(cert)
}

/// Orders certificates by relative minimum eigenvalue, ties by configuration index.
pub fn certificate_order(a: &GramCertificate, b: &GramCertificate) -> core::cmp::Ordering {
    a.relative_min
        .partial_cmp(&b.relative_min)
        .unwrap_or(core::cmp::Ordering::Equal)
        .then(a.configuration.cmp(&b.configuration))
}

/// Indices of the configurations worth refining, given all raw certificates.
/// Empty when a witness is already present.
pub fn refinement_candidates(certs: &[GramCertificate], opts: &WitnessOptions) -> Vec<usize> {
    if certs.iter().any(|c| c.verdict == Verdict::Witness) {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..certs.len()).collect();
    idx.sort_by(|&a, &b| certificate_order(&certs[a], &certs[b]));
    idx.truncate(opts.refine_top);
    idx
}

/// Most negative certificate, deterministic tie-break.
pub fn best_certificate(certs: Vec<GramCertificate>) -> Option<GramCertificate> {
    certs.into_iter().min_by(certificate_order)
}

/// Draws `budget` configurations, refines the most promising ones if no
/// witness turned up, and returns the most negative certificate.
///
/// A returned `Psd` verdict means "not falsified within budget", not a proof
/// of positivity.
pub fn witness_search(alg: Algebra, mu: f64, master_seed: u64, opts: &WitnessOptions) -> Result<GramCertificate> {
    let certs: Vec<GramCertificate> =
        (0..opts.budget).map(|i| evaluate_configuration(alg, mu, master_seed, i, opts.tol)).collect::<Result<_>>()?;
    let chosen = refinement_candidates(&certs, opts);
    let mut refined = Vec::with_capacity(chosen.len());
    for &i in &chosen {
        refined.push(refine(mu, &certs[i], opts.refine_iterations, opts.tol)?);
    }
    let mut all = certs;
    all.extend(refined);
    best_certificate(all).ok_or(Error::Degenerate("empty budget"))
}
