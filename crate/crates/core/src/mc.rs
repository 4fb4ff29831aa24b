//! Samplers for Riesz (Wishart) laws on the cone and on boundary orbits,
//! operator-valued Monte Carlo means, and a double-exponential quadrature
//! on rank-2 cones used as an independent oracle.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::jordan::{Algebra, Element, Family, LinOp};
use crate::linalg::{CMatrix, Matrix};
use crate::special::{self, MC_FLOOR};
use crate::tube::{u_point, TubePoint};

/// Gamma(shape, 1) variate.
pub fn gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::Domain("gamma shape must be positive"));
    }
    let g = Gamma::new(shape, 1.0).map_err(|_| Error::Domain("gamma shape must be positive"))?;
    Ok(g.sample(rng))
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Uniform point on the unit sphere of `R^m`.
fn sphere_point<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| normal(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// A source of random cone (or boundary) elements.
pub trait Sampler: Sync {
    fn algebra(&self) -> Algebra;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element>;
}

/// The normalised Riesz law `e^{−tr x}(det x)^{μ−n/r} dx / Γ_Ω(μ)` on `Ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RieszSampler {
    alg: Algebra,
    mu: f64,
}

impl RieszSampler {
    /// Requires `μ > (r−1)d/2`.
    pub fn new(alg: Algebra, mu: f64) -> Result<Self> {
        let lo = (alg.rank() as f64 - 1.0) * alg.half_d();
        if !(mu > lo) || !mu.is_finite() {
            return Err(Error::Domain("Riesz sampler needs mu > (r-1)d/2"));
        }
        Ok(Self { alg, mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

impl Sampler for RieszSampler {
    fn algebra(&self) -> Algebra {
        self.alg
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
        sample_riesz(self.alg, self.mu, rng)
    }
}

/// One draw from the Riesz law.
///
/// Matrix families use the Bartlett factor `Y = TT*` with `T_jj² ~ Γ(μ−(j−1)d/2)`
/// and strictly lower entries of variance 1/2 per real coordinate. Spin factors
/// draw the eigenvalue pair `s·(b, 1−b)` with `s ~ Γ(2μ)` and `b` from a
/// symmetric Beta proposal accepted with probability `|1−2b|^d`, then a uniform frame.
pub fn sample_riesz<R: Rng + ?Sized>(alg: Algebra, mu: f64, rng: &mut R) -> Result<Element> {
    let (r, hd) = (alg.rank(), alg.half_d());
    if !(mu > (r as f64 - 1.0) * hd) {
        return Err(Error::Domain("Riesz sampler needs mu > (r-1)d/2"));
    }
    let s = core::f64::consts::FRAC_1_SQRT_2;
    match alg.family() {
        Family::SymR => {
            let mut t = Matrix::zeros(r, r);
            for j in 0..r {
                t[(j, j)] = gamma_variate(mu - j as f64 * hd, rng)?.sqrt();
                for i in j + 1..r {
                    t[(i, j)] = s * normal(rng);
                }
            }
            Element::from_sym(alg, t.matmul(&t.transpose()).symmetrized())
        }
        Family::HermC => {
            let mut t = CMatrix::zeros(r, r);
            for j in 0..r {
                t[(j, j)] = Complex64::new(gamma_variate(mu - j as f64 * hd, rng)?.sqrt(), 0.0);
                for i in j + 1..r {
                    t[(i, j)] = Complex64::new(s * normal(rng), s * normal(rng));
                }
            }
            Element::from_herm(alg, t.matmul(&t.adjoint()).hermitian_part())
        }
        Family::Spin => {
            let d = alg.peirce_d() as i32;
            let n = alg.dim() as f64;
            let total = gamma_variate(2.0 * mu, rng)?;
            let shape = mu - n / 2.0 + 1.0;
            let b = loop {
                let g1 = gamma_variate(shape, rng)?;
                let g2 = gamma_variate(shape, rng)?;
                let b = g1 / (g1 + g2);
                if rng.random::<f64>() < (1.0 - 2.0 * b).abs().powi(d) {
                    break b;
                }
            };
            let (l1, l2) = (total * b.max(1.0 - b), total * b.min(1.0 - b));
            spin_from_eigen(alg, l1, l2, &sphere_point(alg.dim() - 1, rng))
        }
    }
}

fn spin_from_eigen(alg: Algebra, l1: f64, l2: f64, omega: &[f64]) -> Result<Element> {
    let half = (l1 - l2) / 2.0;
    Element::from_spin(alg, (l1 + l2) / 2.0, omega.iter().map(|w| half * w).collect())
}

/// Singular Wishart `Y = BB*` with `B` an `r×k` Gaussian matrix, variance 1/2
/// per real coordinate. Samples the normalised orbit measure `e^{−tr y}dν_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitSampler {
    alg: Algebra,
    k: usize,
}

impl OrbitSampler {
    pub fn new(alg: Algebra, k: usize) -> Result<Self> {
        if alg.family() == Family::Spin {
            return Err(Error::Unsupported("orbit sampler needs a matrix family; use RankOneSampler"));
        }
        let r = alg.rank();
        if k < 1 || k >= r {
            return Err(Error::OutOfRange { what: "k", value: k as i64, lo: 1, hi: r as i64 - 1 });
        }
        Ok(Self { alg, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl Sampler for OrbitSampler {
    fn algebra(&self) -> Algebra {
        self.alg
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
        sample_orbit(self.alg, self.k, rng)
    }
}

pub fn sample_orbit<R: Rng + ?Sized>(alg: Algebra, k: usize, rng: &mut R) -> Result<Element> {
    let r = alg.rank();
    if k < 1 || k >= r {
        return Err(Error::OutOfRange { what: "k", value: k as i64, lo: 1, hi: r as i64 - 1 });
    }
    let s = core::f64::consts::FRAC_1_SQRT_2;
    match alg.family() {
        Family::SymR => {
            let b = Matrix::from_fn(r, k, |_, _| s * normal(rng));
            Element::from_sym(alg, b.matmul(&b.transpose()).symmetrized())
        }
        Family::HermC => {
            let b = CMatrix::from_fn(r, k, |_, _| Complex64::new(s * normal(rng), s * normal(rng)));
            Element::from_herm(alg, b.matmul(&b.adjoint()).hermitian_part())
        }
        Family::Spin => Err(Error::Unsupported("orbit sampler needs a matrix family; use RankOneSampler")),
    }
}

/// `λc` with `λ ~ Γ(rd/2)` and `c` a uniform primitive idempotent: the rank-one
/// orbit law for every family (for matrix families it agrees with `k = 1`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankOneSampler {
    alg: Algebra,
}

impl RankOneSampler {
    pub fn new(alg: Algebra) -> Self {
        Self { alg }
    }
}

impl Sampler for RankOneSampler {
    fn algebra(&self) -> Algebra {
        self.alg
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
        sample_rank_one(self.alg, rng)
    }
}

pub fn sample_rank_one<R: Rng + ?Sized>(alg: Algebra, rng: &mut R) -> Result<Element> {
    match alg.family() {
        Family::Spin => {
            let l = gamma_variate(alg.rank() as f64 * alg.half_d(), rng)?;
            spin_from_eigen(alg, l, 0.0, &sphere_point(alg.dim() - 1, rng))
        }
        _ => sample_orbit(alg, 1, rng),
    }
}

/// Samples per chunk in [`estimate_operator_mean`]; each chunk has its own stream.
pub const CHUNK_SIZE: u64 = 4096;

/// Running elementwise mean and sum of squared deviations.
#[derive(Clone, Debug, PartialEq)]
pub struct ChunkStats {
    pub count: u64,
    pub mean: Vec<f64>,
    pub m2: Vec<f64>,
}

impl ChunkStats {
    pub fn new(len: usize) -> Self {
        Self { count: 0, mean: vec![0.0; len], m2: vec![0.0; len] }
    }

    /// Welford update.
    pub fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let delta = v - *m;
            *m += delta / n;
            *s += delta * (v - *m);
        }
    }

    /// Pairwise combination (Chan et al.).
    pub fn merge(&mut self, other: &ChunkStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * nb / n;
            self.m2[i] += other.m2[i] + delta * delta * na * nb / n;
        }
        self.count += other.count;
    }
}

/// Number of chunks for `samples` draws.
pub fn chunk_count(samples: u64) -> u64 {
    samples.div_ceil(CHUNK_SIZE)
}

/// Accumulates chunk `index` of an `N = samples` estimate.
pub fn estimate_chunk<S, F>(sampler: &S, f: &F, samples: u64, master_seed: u64, index: u64) -> Result<ChunkStats>
where
    S: Sampler + ?Sized,
    F: Fn(&Element) -> Result<LinOp> + ?Sized,
{
    let n = sampler.algebra().dim();
    let start = index * CHUNK_SIZE;
    let end = samples.min(start + CHUNK_SIZE);
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    let mut stats = ChunkStats::new(n * n);
    for i in start..end {
        let wrap = |e: Error| Error::Evaluation { index: i, inner: Box::new(e) };
        let y = sampler.sample(&mut rng).map_err(wrap)?;
        let q = f(&y).map_err(wrap)?;
        stats.push(q.as_matrix().as_slice());
    }
    Ok(stats)
}

/// Monte Carlo mean of an operator-valued function.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OperatorEstimate {
    pub algebra: Algebra,
    /// Symmetrised mean, row-major `n×n`.
    pub mean: Matrix,
    /// Elementwise standard error of the mean.
    pub stderr: Matrix,
    pub samples: u64,
    pub seed: u64,
    /// `‖M − Mᵀ‖_F/‖M‖_F` of the raw mean.
    pub symmetry_defect: f64,
}

/// Comparison of an estimate with its exact target.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimateCheck {
    /// Largest `|mean − target|/stderr` over the entries (with a tiny floor on stderr).
    pub max_sigma: f64,
    /// `‖mean − target‖_F / ‖target‖_F`.
    pub frobenius_rel: f64,
    pub pass: bool,
}

impl OperatorEstimate {
    pub fn from_stats(alg: Algebra, stats: &ChunkStats, seed: u64) -> Result<Self> {
        if stats.count < 2 {
            return Err(Error::Degenerate("need at least two samples"));
        }
        let n = alg.dim();
        let cnt = stats.count as f64;
        let raw = Matrix::from_row_slice(n, n, &stats.mean);
        let se: Vec<f64> = stats.m2.iter().map(|s| (s.max(0.0) / (cnt - 1.0) / cnt).sqrt()).collect();
        let defect = raw.asymmetry() / raw.frobenius_norm().max(f64::MIN_POSITIVE);
        Ok(Self {
            algebra: alg,
            mean: raw.symmetrized(),
            stderr: Matrix::from_row_slice(n, n, &se),
            samples: stats.count,
            seed,
            symmetry_defect: defect,
        })
    }

    pub fn mean_op(&self) -> LinOp {
        LinOp::from_matrix(self.algebra, self.mean.clone()).expect("finite mean")
    }

    /// Every entry within `sigmas` standard errors and Frobenius deviation at
    /// most `frobenius_tol` relative to the target.
    pub fn check(&self, target: &LinOp, sigmas: f64, frobenius_tol: f64) -> EstimateCheck {
        let t = target.as_matrix();
        let floor = MC_FLOOR * t.max_abs().max(1.0);
        let mut max_sigma: f64 = 0.0;
        let mut ok = true;
        for (i, (&m, &tv)) in self.mean.as_slice().iter().zip(t.as_slice()).enumerate() {
            let diff = (m - tv).abs();
            let se = self.stderr.as_slice()[i];
            ok &= diff <= sigmas * se + floor;
            max_sigma = max_sigma.max(diff / (se + floor));
        }
        let frob = self.mean.sub(t).frobenius_norm() / t.frobenius_norm().max(f64::MIN_POSITIVE);
        EstimateCheck { max_sigma, frobenius_rel: frob, pass: ok && frob <= frobenius_tol }
    }
}

/// Sequential estimate over all chunks, merged in chunk order. Parallel
/// drivers call [`estimate_chunk`] and merge the same way.
pub fn estimate_operator_mean<S, F>(sampler: &S, f: &F, samples: u64, master_seed: u64) -> Result<OperatorEstimate>
where
    S: Sampler + ?Sized,
    F: Fn(&Element) -> Result<LinOp> + ?Sized,
{
    if samples < 2 {
        return Err(Error::Degenerate("need at least two samples"));
    }
    let alg = sampler.algebra();
    let n = alg.dim();
    let mut total = ChunkStats::new(n * n);
    for c in 0..chunk_count(samples) {
        total.merge(&estimate_chunk(sampler, f, samples, master_seed, c)?);
    }
    OperatorEstimate::from_stats(alg, &total, master_seed)
}

/// Monte Carlo target `μ(μ+1)(μ−d/2)·Id` of `μP(Y) − (d/2)p_Y` under the Riesz law.
pub fn riesz_mean_target(alg: Algebra, mu: f64) -> LinOp {
    LinOp::identity(alg).scale(mu * (mu + 1.0) * (mu - alg.half_d()))
}

// ---- rank-2 quadrature -------------------------------------------------

/// `(x, w)` for `∫_0^∞ g`, exp-sinh substitution `x = exp(π/2·sinh s)` with step `h`.
fn exp_sinh(h: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let kmax = (4.5 / h).ceil() as i64;
    for k in -kmax..=kmax {
        let s = k as f64 * h;
        let e = PI / 2.0 * s.sinh();
        if e > 6.7 {
            // x > e^{6.7} ≈ 800: the exponential weight is below 1e−340
            break;
        }
        let x = e.exp();
        let w = h * x * PI / 2.0 * s.cosh();
        if x > 0.0 && w > 0.0 {
            out.push((x, w));
        }
    }
    out
}

/// `(q, 1−q, w)` for `∫_0^1 g`, tanh-sinh on `[0, 1]`.
fn tanh_sinh(h: f64) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    let kmax = (3.2 / h).ceil() as i64;
    for k in -kmax..=kmax {
        let s = k as f64 * h;
        let a = PI / 2.0 * s.sinh();
        let c = a.cosh();
        // q = (1 + tanh a)/2, 1 − q = 1/(1 + e^{2a})
        let q = 1.0 / (1.0 + (-2.0 * a).exp());
        let cq = 1.0 / (1.0 + (2.0 * a).exp());
        let w = h * PI / 4.0 * s.cosh() / (c * c);
        if q > 0.0 && cq > 0.0 && w > 0.0 {
            out.push((q, cq, w));
        }
    }
    out
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p0 = 1.0;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Product rule for the unit sphere of `R^m`; weights sum to its area.
fn sphere_rule(m: usize, level: u32) -> Vec<(Vec<f64>, f64)> {
    match m {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => {
            let k = 16usize << level;
            (0..k)
                .map(|j| {
                    let a = 2.0 * PI * j as f64 / k as f64;
                    (vec![a.cos(), a.sin()], 2.0 * PI / k as f64)
                })
                .collect()
        }
        _ => {
            let inner = sphere_rule(m - 1, level);
            let mut out = Vec::new();
            for (x, w) in gauss_legendre(8 << level) {
                let th = PI / 2.0 * (x + 1.0);
                let (c, s) = (th.cos(), th.sin());
                let wt = w * PI / 2.0 * s.powi(m as i32 - 2);
                for (v, wv) in &inner {
                    let mut p = Vec::with_capacity(m);
                    p.push(c);
                    p.extend(v.iter().map(|y| s * y));
                    out.push((p, wt * wv));
                }
            }
            out
        }
    }
}

/// Orthonormal basis of `e^⊥` in coordinates (Gram–Schmidt on the standard basis).
fn traceless_basis(alg: Algebra) -> Vec<Vec<f64>> {
    let n = alg.dim();
    let e = Element::identity(alg).to_coords();
    let en = e.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<f64>> = vec![e.iter().map(|x| x / en).collect()];
    for k in 0..n {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for b in &basis {
            let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= p * y;
            }
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-8 {
            basis.push(v.into_iter().map(|x| x / nv).collect());
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Result of [`quadrature_rank2`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: Vec<Complex64>,
    /// Estimated relative error: `δ_L²/δ_{L−1}` from the differences `δ` of successive levels.
    pub error_estimate: f64,
    pub level: u32,
    pub evaluations: u64,
}

/// Refinement levels tried by [`quadrature_rank2`] before giving up.
pub const QUADRATURE_MAX_LEVEL: u32 = 3;

/// `∫_Ω f(v)(det v)^a dv` (Lebesgue measure of the trace form) on a rank-2 cone.
///
/// Polar coordinates `v = t(e + q·w)` with `w` traceless of eigenvalues `±1`
/// give `dv = 2^{n/2} t^{n−1} q^{n−2} dt dq dσ(ω)`. The radial rule is rescaled
/// per direction by `(decay | e + q·w)`, so `f` should decay like `e^{−(decay|v)}`
/// with `decay ∈ Ω`. Levels halve the step until the error estimate is below `tol`.
pub fn quadrature_rank2<F>(alg: Algebra, a: f64, decay: &Element, f: F, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(&Element) -> Vec<Complex64>,
{
    if alg.rank() != 2 {
        return Err(Error::Unsupported("rank-2 quadrature needs a rank-2 algebra"));
    }
    if !(a > -1.0) {
        return Err(Error::Domain("det exponent must exceed -1"));
    }
    decay.require_cone()?;
    let mut prev: Option<Vec<Complex64>> = None;
    let mut prev_diff: Option<f64> = None;
    let mut evals = 0;
    let mut last_err = f64::INFINITY;
    for level in 0..=QUADRATURE_MAX_LEVEL {
        let (v, ev) = quadrature_rank2_level(alg, a, decay, &f, level)?;
        evals += ev;
        if let Some(p) = prev {
            let num: f64 = v.iter().zip(&p).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            let den: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            let diff = num / den;
            // halving h roughly squares the error of a double-exponential rule
            last_err = match prev_diff {
                Some(pd) if pd > diff => diff * diff / pd,
                _ => diff,
            };
            prev_diff = Some(diff);
            if last_err <= tol {
                return Ok(QuadratureResult { value: v, error_estimate: last_err, level, evaluations: evals });
            }
        }
        prev = Some(v);
    }
    Err(Error::QuadratureFailed { estimate: last_err })
}

fn quadrature_rank2_level<F>(alg: Algebra, a: f64, decay: &Element, f: &F, level: u32) -> Result<(Vec<Complex64>, u64)>
where
    F: Fn(&Element) -> Vec<Complex64>,
{
    let n = alg.dim();
    let h = 0.25 / (1u32 << level) as f64;
    let tr = exp_sinh(h);
    let qr = tanh_sinh(h);
    let sr = sphere_rule(n - 1, level);
    let basis = traceless_basis(alg);
    let e = Element::identity(alg).to_coords();
    let dc = decay.to_coords();
    let sqrt2 = core::f64::consts::SQRT_2;
    let tpow = 2.0 * a + n as f64 - 1.0;
    let pref = 2f64.powf(n as f64 / 2.0);
    let mut acc: Option<Vec<Complex64>> = None;
    let mut evals = 0u64;
    for (omega, wo) in &sr {
        // w = √2 Σ ω_i b_i has eigenvalues ±1
        let mut w = vec![0.0; n];
        for (oi, b) in omega.iter().zip(&basis) {
            for (x, y) in w.iter_mut().zip(b) {
                *x += sqrt2 * oi * y;
            }
        }
        for &(q, cq, wq) in &qr {
            let dir: Vec<f64> = e.iter().zip(&w).map(|(x, y)| x + q * y).collect();
            let scale: f64 = dir.iter().zip(&dc).map(|(x, y)| x * y).sum();
            let one_minus_q2 = cq * (1.0 + q);
            let wqa = wq * q.powi(n as i32 - 2) * one_minus_q2.powf(a);
            for &(tau, wt) in &tr {
                let t = tau / scale;
                let weight = pref * wo * wqa * wt / scale * t.powf(tpow);
                if weight == 0.0 || !weight.is_finite() {
                    continue;
                }
                let c: Vec<f64> = dir.iter().map(|x| t * x).collect();
                let v = Element::from_coords(alg, &c)?;
                let fv = f(&v);
                evals += 1;
                match acc.as_mut() {
                    None => acc = Some(fv.iter().map(|x| x * weight).collect()),
                    Some(s) => {
                        for (si, x) in s.iter_mut().zip(&fv) {
                            *si += x * weight;
                        }
                    }
                }
            }
        }
    }
    acc.map(|v| (v, evals)).ok_or(Error::QuadratureFailed { estimate: f64::INFINITY })
}

/// `E[g(Y)]` under the Riesz law on a rank-2 cone, by quadrature.
pub fn riesz_expectation_rank2<F>(alg: Algebra, mu: f64, g: F, tol: f64) -> Result<Vec<Complex64>>
where
    F: Fn(&Element) -> Vec<Complex64>,
{
    let a = mu - alg.n_over_r();
    let gamma = special::gamma_cone(&alg, mu)?;
    let e = Element::identity(alg);
    let res = quadrature_rank2(
        alg,
        a,
        &e,
        |v| {
            let damp = (-v.trace()).exp();
            g(v).into_iter().map(|x| x * damp).collect()
        },
        tol,
    )?;
    let inv = gamma.recip().value();
    Ok(res.value.into_iter().map(|x| x * inv).collect())
}

/// `∫_Ω e^{−(u|v)} r_μ(v) d*v` with `u = (z − w̄)/2i`, by rank-2 quadrature.
/// The integral representation of `Q_μ(z,w)`, computed without any complex
/// determinant power.
pub fn laplace_kernel_rank2(mu: f64, z: &TubePoint, w: &TubePoint, tol: f64) -> Result<CMatrix> {
    let alg = z.algebra();
    let ab = special::alpha_beta(&alg, mu)?;
    let u = u_point(z, w);
    let uc = u.to_coords();
    let n = alg.dim();
    let c = ab.c.value();
    let res = quadrature_rank2(
        alg,
        mu - alg.n_over_r(),
        u.re(),
        |v| {
            let vc = v.to_coords();
            let s: Complex64 = uc.iter().zip(&vc).map(|(x, y)| x * y).sum();
            let damp = (-s).exp() * c;
            special::riesz_operator(mu, v).as_matrix().as_slice().iter().map(|x| damp * x).collect()
        },
        tol,
    )?;
    Ok(CMatrix::from_fn(n, n, |i, j| res.value[i * n + j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tube::kernel_q;
    use approx::assert_relative_eq;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn gamma_variate_domain() {
        assert!(gamma_variate(0.0, &mut rng(0)).is_err());
        assert!(gamma_variate(-1.0, &mut rng(0)).is_err());
        let mut r = rng(1);
        let m: f64 = (0..20000).map(|_| gamma_variate(2.5, &mut r).unwrap()).sum::<f64>() / 20000.0;
        assert!((m - 2.5).abs() < 0.05);
    }

    #[test]
    fn samplers_land_in_the_right_orbit() {
        let mut r = rng(2);
        for alg in [Algebra::sym(3).unwrap(), Algebra::herm(2).unwrap(), Algebra::spin(5).unwrap()] {
            let mu = alg.rank() as f64 * alg.half_d() + 0.3;
            for _ in 0..200 {
                assert!(sample_riesz(alg, mu, &mut r).unwrap().in_cone().unwrap());
                assert_eq!(sample_rank_one(alg, &mut r).unwrap().rank_of().unwrap(), 1);
            }
        }
        let alg = Algebra::sym(4).unwrap();
        for k in 1..4 {
            for _ in 0..200 {
                assert_eq!(sample_orbit(alg, k, &mut r).unwrap().rank_of().unwrap(), k);
            }
        }
        assert!(sample_orbit(alg, 4, &mut r).is_err());
        assert!(sample_riesz(alg, 1.5, &mut r).is_err());
        assert!(OrbitSampler::new(Algebra::spin(4).unwrap(), 1).is_err());
    }

    #[test]
    fn welford_merge_matches_direct() {
        let xs: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64 * 0.3 - 1.0).collect();
        let mut all = ChunkStats::new(1);
        xs.iter().for_each(|x| all.push(&[*x]));
        let mut a = ChunkStats::new(1);
        let mut b = ChunkStats::new(1);
        xs[..17].iter().for_each(|x| a.push(&[*x]));
        xs[17..].iter().for_each(|x| b.push(&[*x]));
        a.merge(&b);
        let mean = xs.iter().sum::<f64>() / 50.0;
        let m2: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        assert_relative_eq!(a.mean[0], mean, epsilon = 1e-14);
        assert_relative_eq!(a.m2[0], m2, epsilon = 1e-12);
        assert_relative_eq!(all.m2[0], m2, epsilon = 1e-12);
    }

    #[test]
    fn constant_identity_has_zero_error() {
        let alg = Algebra::sym(2).unwrap();
        let s = RieszSampler::new(alg, 2.0).unwrap();
        let est = estimate_operator_mean(&s, &|_: &Element| Ok(LinOp::identity(alg)), 1000, 5).unwrap();
        assert_eq!(est.mean, Matrix::identity(3));
        assert!(est.stderr.as_slice().iter().all(|&x| x == 0.0));
        assert!(est.check(&LinOp::identity(alg), 3.0, 0.02).pass);
    }

    #[test]
    fn errors_carry_the_sample_index() {
        let alg = Algebra::sym(2).unwrap();
        let s = RieszSampler::new(alg, 2.0).unwrap();
        let f = |y: &Element| if y.trace() > 0.0 { Err(Error::Domain("boom")) } else { Ok(LinOp::identity(alg)) };
        match estimate_operator_mean(&s, &f, 10, 1) {
            Err(Error::Evaluation { index: 0, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn det_moment_symr2() {
        let alg = Algebra::sym(2).unwrap();
        let mut r = rng(3);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_riesz(alg, 2.0, &mut r).unwrap().det()).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n as f64 - 1.0);
        assert!((m - 3.0).abs() < 3.0 * (var / n as f64).sqrt(), "{m}");
    }

    #[test]
    fn quadrature_normalisation_and_gamma_ratio() {
        for (alg, mu) in
            [(Algebra::spin(3).unwrap(), 2.0), (Algebra::sym(2).unwrap(), 1.7), (Algebra::herm(2).unwrap(), 2.4)]
        {
            let e = Element::identity(alg);
            let g = special::gamma_cone(&alg, mu).unwrap();
            let q =
                quadrature_rank2(alg, mu - alg.n_over_r(), &e, |v| vec![Complex64::new((-v.trace()).exp(), 0.0)], 1e-7)
                    .unwrap();
            assert_relative_eq!(q.value[0].re, g.value(), max_relative = 1e-8);
            let ratio = riesz_expectation_rank2(alg, mu, |v| vec![Complex64::new(v.det(), 0.0)], 1e-7).unwrap()[0].re;
            assert_relative_eq!(ratio, special::gamma_cone_step(&alg, mu), max_relative = 1e-6);
        }
    }

    #[test]
    fn laplace_transform_of_density_is_kernel() {
        let alg = Algebra::spin(3).unwrap();
        let mut r = rng(9);
        let z = TubePoint::from_parts(crate::jordan::random::gaussian(alg, &mut r).scale(0.5), Element::identity(alg))
            .unwrap();
        let w = TubePoint::i_e(alg);
        let q = laplace_kernel_rank2(3.0, &z, &w, 1e-6).unwrap();
        let k = kernel_q(3.0, &z, &w).unwrap();
        let diff = q.sub(k.as_matrix()).frobenius_norm() / k.frobenius_norm();
        assert!(diff < 1e-5, "{diff}");
    }
}
