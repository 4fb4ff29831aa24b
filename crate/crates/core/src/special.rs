//! Cone Gamma function, Riesz moments and the operator-valued densities
//! `r_μ` and `r_k`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jordan::{Algebra, Element, LinOp};
use crate::linalg::{self, Matrix};

/// Distance to `{0, −1, d/2}` below which `μ` is refused.
pub const SINGULAR_MU_TOL: f64 = 1e-8;

/// A real number stored as `sign · exp(ln_abs)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogValue {
    /// −1, 0 or +1.
    pub sign: f64,
    pub ln_abs: f64,
}

#[allow(clippy::should_implement_trait)]
impl LogValue {
    pub const ONE: LogValue = LogValue { sign: 1.0, ln_abs: 0.0 };

    pub fn new(x: f64) -> Self {
        if x == 0.0 {
            Self { sign: 0.0, ln_abs: f64::NEG_INFINITY }
        } else {
            Self { sign: x.signum(), ln_abs: x.abs().ln() }
        }
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn mul(self, o: LogValue) -> LogValue {
        LogValue { sign: self.sign * o.sign, ln_abs: self.ln_abs + o.ln_abs }
    }

    pub fn div(self, o: LogValue) -> LogValue {
        LogValue { sign: self.sign * o.sign, ln_abs: self.ln_abs - o.ln_abs }
    }

    pub fn recip(self) -> LogValue {
        LogValue { sign: self.sign, ln_abs: -self.ln_abs }
    }

    pub fn powf(self, p: f64) -> Result<LogValue> {
        if self.sign < 0.0 {
            return Err(Error::Domain("real power of a negative number"));
        }
        Ok(LogValue { sign: self.sign, ln_abs: p * self.ln_abs })
    }
}

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == libm::round(z.re)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` for complex `z` (Lanczos, reflected for `Re z < 1/2`). For
/// real `z` the result is `ln|Γ(z)| + iπ` when `Γ(z) < 0`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole { index: 0 });
    }
    if z.im == 0.0 {
        let (lg, sign) = libm::lgamma_r(z.re);
        return Ok(Complex64::new(lg, if sign < 0 { PI } else { 0.0 }));
    }
    Ok(ln_gamma_lanczos(z))
}

fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_lanczos(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Complex64::new(0.5 * (2.0 * PI).ln(), 0.0) + (z + 0.5) * t.ln() - t + x.ln()
}

fn cone_prefix(alg: &Algebra) -> f64 {
    0.5 * (alg.dim() - alg.rank()) as f64 * (2.0 * PI).ln()
}

/// `ln Γ_Ω(λ) = ((n−r)/2)·ln 2π + Σⱼ ln Γ(λ − (j−1)d/2)`.
pub fn log_gamma_cone(alg: &Algebra, lambda: Complex64) -> Result<Complex64> {
    let s: Vec<Complex64> = (0..alg.rank()).map(|_| lambda).collect();
    log_gamma_cone_vec(alg, &s)
}

/// `ln Γ_Ω(s) = ((n−r)/2)·ln 2π + Σⱼ ln Γ(sⱼ − (j−1)d/2)`.
pub fn log_gamma_cone_vec(alg: &Algebra, s: &[Complex64]) -> Result<Complex64> {
    if s.len() != alg.rank() {
        return Err(Error::CoordinateLength { expected: alg.rank(), found: s.len() });
    }
    let mut acc = Complex64::new(cone_prefix(alg), 0.0);
    for (j, sj) in s.iter().enumerate() {
        let z = sj - j as f64 * alg.half_d();
        acc += ln_gamma(z).map_err(|_| Error::Pole { index: j + 1 })?;
    }
    Ok(acc)
}

/// Real `Γ_Ω(λ)` in sign/log form.
pub fn gamma_cone(alg: &Algebra, lambda: f64) -> Result<LogValue> {
    let mut out = LogValue { sign: 1.0, ln_abs: cone_prefix(alg) };
    for j in 0..alg.rank() {
        let z = lambda - j as f64 * alg.half_d();
        if is_pole(Complex64::new(z, 0.0)) {
            return Err(Error::Pole { index: j + 1 });
        }
        let (lg, sign) = libm::lgamma_r(z);
        out = out.mul(LogValue { sign: sign as f64, ln_abs: lg });
    }
    Ok(out)
}

/// `Γ_Ω(λ+1)/Γ_Ω(λ) = ∏ⱼ (λ − (j−1)d/2)`.
pub fn gamma_cone_step(alg: &Algebra, lambda: f64) -> f64 {
    (0..alg.rank()).map(|j| lambda - j as f64 * alg.half_d()).product()
}

/// Signature `m₁ ≥ m₂ ≥ … ≥ m_r ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(m: Vec<u32>) -> Result<Self> {
        if m.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain("multi-index must be nonincreasing"));
        }
        Ok(Self(m))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// `m + μ` as a complex vector.
    pub fn shifted(&self, mu: f64) -> Vec<Complex64> {
        self.0.iter().map(|&m| Complex64::new(m as f64 + mu, 0.0)).collect()
    }
}

/// `Γ_Ω(m + μ) / Γ_Ω(μ)` for real `μ`, computed from the vector Gamma function.
pub fn gamma_cone_shift_ratio(alg: &Algebra, m: &MultiIndex, mu: f64) -> Result<f64> {
    if m.as_slice().len() != alg.rank() {
        return Err(Error::CoordinateLength { expected: alg.rank(), found: m.as_slice().len() });
    }
    let top = log_gamma_cone_vec(alg, &m.shifted(mu))?;
    let bottom = log_gamma_cone(alg, Complex64::new(mu, 0.0))?;
    Ok((top - bottom).exp().re)
}

fn require_moment_domain(alg: &Algebra, mu: f64) -> Result<()> {
    if mu > (alg.rank() - 1) as f64 * alg.half_d() {
        Ok(())
    } else {
        Err(Error::Domain("moment integrals need mu > (r-1)d/2"))
    }
}

/// `I₂₀ = ∫ e^{−tr x} p₂₀(x) (det x)^μ d*x = r(1 + rd/2) μ(μ+1) Γ_Ω(μ)`.
pub fn moment_i20(alg: &Algebra, mu: f64) -> Result<LogValue> {
    require_moment_domain(alg, mu)?;
    let r = alg.rank() as f64;
    let poly = r * (1.0 + r * alg.half_d()) * mu * (mu + 1.0);
    Ok(LogValue::new(poly).mul(gamma_cone(alg, mu)?))
}

/// `I₁₁ = ∫ e^{−tr x} p₁₁(x) (det x)^μ d*x = r(r−1) μ(μ − d/2) Γ_Ω(μ)`.
pub fn moment_i11(alg: &Algebra, mu: f64) -> Result<LogValue> {
    require_moment_domain(alg, mu)?;
    let r = alg.rank() as f64;
    let poly = r * (r - 1.0) * mu * (mu - alg.half_d());
    Ok(LogValue::new(poly).mul(gamma_cone(alg, mu)?))
}

/// The four integrals `∫ e^{−tr x} f(x) (det x)^μ d*x` for
/// `f = Tr P(x), Tr p_x, (P(x)e|e), (p_x e|e)`, each divided by `Γ_Ω(μ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceMoments {
    pub tr_p: f64,
    pub tr_rank_one: f64,
    pub p_ee: f64,
    pub rank_one_ee: f64,
}

/// [`TraceMoments`] assembled from the two invariant moments, which are
/// themselves evaluated through `Γ_Ω(m + μ) p(e)` (not through the closed
/// forms of [`moment_i20`], [`moment_i11`]).
pub fn trace_moments(alg: &Algebra, mu: f64) -> Result<TraceMoments> {
    require_moment_domain(alg, mu)?;
    let r = alg.rank();
    let d = alg.peirce_d() as f64;
    let e = Element::identity(*alg);
    let (p20e, p11e) = e.invariant_polys();
    let mut m20 = alloc::vec![0u32; r];
    m20[0] = 2;
    let mut m11 = alloc::vec![0u32; r];
    m11[0] = 1;
    m11[1] = 1;
    let i20 = p20e * gamma_cone_shift_ratio(alg, &MultiIndex::new(m20)?, mu)?;
    let i11 = p11e * gamma_cone_shift_ratio(alg, &MultiIndex::new(m11)?, mu)?;
    let k = 2.0 / (d + 2.0);
    Ok(TraceMoments {
        tr_p: k * (i20 + d * d / 4.0 * i11),
        tr_rank_one: k * (i20 - d / 2.0 * i11),
        p_ee: k * (i20 - d / 2.0 * i11),
        rank_one_ee: k * (i20 + i11),
    })
}

/// `α(μ) = μ·c(μ)`, `β(μ) = −(d/2)·c(μ)` with `c(μ) = 1/(μ(μ+1)(μ−d/2)Γ_Ω(μ))`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlphaBeta {
    pub c: LogValue,
    pub alpha: f64,
    pub beta: f64,
}

fn require_regular_mu(alg: &Algebra, mu: f64) -> Result<()> {
    if !mu.is_finite() {
        return Err(Error::Domain("mu must be finite"));
    }
    for s in [0.0, -1.0, alg.half_d()] {
        if (mu - s).abs() < SINGULAR_MU_TOL {
            return Err(Error::SingularParameter { mu });
        }
    }
    Ok(())
}

/// Closed form of the Riesz density coefficients.
pub fn alpha_beta(alg: &Algebra, mu: f64) -> Result<AlphaBeta> {
    require_regular_mu(alg, mu)?;
    let c = LogValue::new(mu * (mu + 1.0) * (mu - alg.half_d())).mul(gamma_cone(alg, mu)?).recip();
    Ok(AlphaBeta { c, alpha: mu * c.value(), beta: -alg.half_d() * c.value() })
}

/// Solves `α Tr P + β Tr p = n`, `α (Pe|e) + β (pe|e) = r` using the moment
/// integrals of [`trace_moments`]; an independent route to [`alpha_beta`].
pub fn alpha_beta_system(alg: &Algebra, mu: f64) -> Result<(f64, f64)> {
    require_regular_mu(alg, mu)?;
    let t = trace_moments(alg, mu)?;
    let a = Matrix::from_row_slice(2, 2, &[t.tr_p, t.tr_rank_one, t.p_ee, t.rank_one_ee]);
    let sol = linalg::solve(&a, &[alg.dim() as f64, alg.rank() as f64]).ok_or(Error::SingularParameter { mu })?;
    let g = gamma_cone(alg, mu)?.recip().value();
    Ok((sol[0] * g, sol[1] * g))
}

/// The reduced 2×2 system matrix for `(α, β)` (right-hand side
/// `(n, r)/(rμΓ_Ω(μ))`), whose determinant is `(n−1)(μ+1)(μ−d/2)`.
pub fn system_matrix(alg: &Algebra, mu: f64) -> Matrix {
    let r = alg.rank() as f64;
    let d = alg.peirce_d() as f64;
    let a = (r - 1.0) * d / 2.0 + 1.0;
    Matrix::from_row_slice(2, 2, &[a * mu - (r - 1.0) * d * d / 4.0 + a, mu + a, mu + a, r * mu + 1.0])
}

/// The unreduced system, read off the four moment integrals:
/// rows `(Tr P, Tr p)` and `((Pe|e), (pe|e))` times `(d+2)/(rμΓ_Ω(μ))`.
pub fn system_matrix_full(alg: &Algebra, mu: f64) -> Matrix {
    let r = alg.rank() as f64;
    let d = alg.peirce_d() as f64;
    let a = (2.0 + r * d) * (mu + 1.0);
    let b = (r - 1.0) * (mu - d / 2.0);
    Matrix::from_row_slice(2, 2, &[a + b * d * d / 2.0, a - b * d, a - b * d, a + 2.0 * b])
}

/// `c(μ)(det y)^μ (μP(y) − (d/2)p_y)` with the scalar part kept in log form.
#[derive(Clone, Debug, PartialEq)]
pub struct RieszDensityValue {
    pub prefactor: LogValue,
    pub operator: LinOp,
}

impl RieszDensityValue {
    pub fn value(&self) -> LinOp {
        self.operator.scale(self.prefactor.value())
    }
}

/// `μP(y) − (d/2)p_y`.
pub fn riesz_operator(mu: f64, y: &Element) -> LinOp {
    let hd = y.algebra().half_d();
    let p = y.quad_rep().into_matrix();
    let q = y.rank_one().into_matrix();
    LinOp::from_matrix(y.algebra(), p.scale(mu).sub(&q.scale(hd))).expect("finite operator")
}

/// The Riesz density `r_μ(y)` for `y ∈ Ω`.
pub fn riesz_density(mu: f64, y: &Element) -> Result<RieszDensityValue> {
    let alg = y.algebra();
    let ab = alpha_beta(&alg, mu)?;
    if !y.in_cone()? {
        return Err(Error::NotInCone { min_eigenvalue: *y.eigenvalues()?.last().expect("rank ≥ 2") });
    }
    let det = LogValue::new(y.det()).powf(mu)?;
    Ok(RieszDensityValue { prefactor: ab.c.mul(det), operator: riesz_operator(mu, y) })
}

/// `4/(k(k−1)(kd+2)d)`.
pub fn boundary_coefficient(alg: &Algebra, k: usize) -> f64 {
    let (k, d) = (k as f64, alg.peirce_d() as f64);
    4.0 / (k * (k - 1.0) * (k * d + 2.0) * d)
}

/// Boundary density `r_k(y) = 4/(k(k−1)(kd+2)d)·(kP(y) − p_y)` on the rank-k orbit.
pub fn boundary_density(k: usize, y: &Element) -> Result<LinOp> {
    let alg = y.algebra();
    let r = alg.rank();
    if k < 2 || k + 1 > r {
        return Err(Error::OutOfRange { what: "k", value: k as i64, lo: 2, hi: r as i64 - 1 });
    }
    if !y.in_closure()? {
        return Err(Error::NotInClosure { min_eigenvalue: *y.eigenvalues()?.last().expect("rank ≥ 2") });
    }
    let rank = y.rank_of()?;
    if rank != k {
        return Err(Error::RankMismatch { expected: k, found: rank });
    }
    Ok(boundary_density_unchecked(k, y))
}

/// [`boundary_density`] without the orbit checks (for hot Monte Carlo loops
/// over samples that are on the orbit by construction).
pub fn boundary_density_unchecked(k: usize, y: &Element) -> LinOp {
    let p = y.quad_rep().into_matrix();
    let q = y.rank_one().into_matrix();
    let m = p.scale(k as f64).sub(&q).scale(boundary_coefficient(&y.algebra(), k));
    LinOp::from_matrix(y.algebra(), m).expect("finite operator")
}

/// Smallest eigenvalue of `μP(y) − (d/2)p_y` for `y` in the closed cone.
pub fn positivity_margin(mu: f64, y: &Element) -> Result<f64> {
    if !y.in_closure()? {
        return Err(Error::NotInClosure { min_eigenvalue: *y.eigenvalues()?.last().expect("rank ≥ 2") });
    }
    riesz_operator(mu, y).min_eigenvalue()
}

/// Fits `Qv ≈ αv + β(v|e)e` from `Tr Q = αn + βr`, `(Qe|e) = αr + βr²` and
/// returns `(α, β, ‖Q − α Id − β p_e‖_F)`.
pub fn k_invariant_decompose(q: &LinOp) -> Result<(f64, f64, f64)> {
    let alg = q.algebra();
    let (n, r) = (alg.dim() as f64, alg.rank() as f64);
    let e = Element::identity(alg);
    let tr = q.trace();
    let qee = q.form(&e, &e)?;
    let det = n * r * r - r * r;
    let alpha = (tr * r * r - qee * r) / det;
    let beta = (n * qee - r * tr) / det;
    let fit = LinOp::identity(alg).scale(alpha).add(&e.rank_one().scale(beta))?;
    let residual = q.sub(&fit)?.frobenius_norm();
    Ok((alpha, beta, residual))
}

/// Outcome of the rank-one obstruction check at `μ = d/2`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObstructionReport {
    pub samples: usize,
    pub alpha: f64,
    /// Mean of `Tr r₁(x)`.
    pub mean_trace: f64,
    /// Mean of `(r₁(x)e|e)`.
    pub mean_form: f64,
    pub ratio: f64,
    pub ratio_stderr: f64,
    /// `n/r`, the ratio `Id` would need.
    pub required_ratio: f64,
    /// `|ratio − 1| ≤ 3·stderr + floor`.
    pub ratio_is_one: bool,
    /// `n/r` is separated from the measured ratio.
    pub obstruction: bool,
}

/// Numerical floor added to Monte Carlo error bars of quantities that are
/// identically constant in exact arithmetic.
pub const MC_FLOOR: f64 = 1e-12;

/// For the forced candidate `r₁(x) = αP(x)` on rank-one samples, measures
/// `Tr Σ / (Σe|e)` with `Σ` the sample mean of `r₁`. `Id` would need `n/r`.
pub fn obstruction_mu_d2(alpha: f64, samples: &[Element]) -> Result<ObstructionReport> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::Degenerate("alpha = 0 gives the zero operator"));
    }
    if samples.len() < 2 {
        return Err(Error::Degenerate("need at least two samples"));
    }
    let alg = samples[0].algebra();
    let e = Element::identity(alg);
    let n = samples.len() as f64;
    let mut tr = Vec::with_capacity(samples.len());
    let mut fm = Vec::with_capacity(samples.len());
    for x in samples {
        alg.check_same(&x.algebra())?;
        let rank = x.rank_of()?;
        if rank != 1 {
            return Err(Error::RankMismatch { expected: 1, found: rank });
        }
        let p = x.quad_rep().scale(alpha);
        tr.push(p.trace());
        fm.push(p.form(&e, &e)?);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    let (ma, mb) = (mean(&tr), mean(&fm));
    if mb == 0.0 {
        return Err(Error::Degenerate("vanishing (r1(x)e|e) mean"));
    }
    let ratio = ma / mb;
    // delta method on A/B
    let resid: Vec<f64> = tr.iter().zip(&fm).map(|(a, b)| (a - ratio * b) / mb).collect();
    let mr = mean(&resid);
    let var = resid.iter().map(|x| (x - mr) * (x - mr)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let required = alg.n_over_r();
    let band = 3.0 * se + MC_FLOOR;
    let ratio_is_one = (ratio - 1.0).abs() <= band;
    Ok(ObstructionReport {
        samples: samples.len(),
        alpha,
        mean_trace: ma,
        mean_form: mb,
        ratio,
        ratio_stderr: se,
        required_ratio: required,
        ratio_is_one,
        obstruction: ratio_is_one && (required - ratio).abs() > band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sym(r: usize) -> Algebra {
        Algebra::sym(r).unwrap()
    }

    #[test]
    fn gamma_cone_sym2_at_2() {
        // √(2π)·Γ(2)·Γ(3/2) = √(2π)·√π/2
        let g = gamma_cone(&sym(2), 2.0).unwrap().value();
        assert_relative_eq!(g, (2.0 * PI).sqrt() * PI.sqrt() / 2.0, max_relative = 1e-14);
        assert_relative_eq!(g, 2.221_441_469_079_183, max_relative = 1e-12);
        let lg = log_gamma_cone(&sym(2), Complex64::new(2.0, 0.0)).unwrap();
        assert_relative_eq!(lg.re, g.ln(), epsilon = 1e-14);
    }

    #[test]
    fn poles_carry_index() {
        assert_eq!(gamma_cone(&sym(3), 0.0), Err(Error::Pole { index: 1 }));
        assert_eq!(gamma_cone(&sym(3), 1.0), Err(Error::Pole { index: 3 }));
        assert_eq!(log_gamma_cone(&sym(3), Complex64::new(0.5, 0.0)), Err(Error::Pole { index: 2 }));
        assert!(log_gamma_cone(&sym(3), Complex64::new(0.5, 1e-3)).is_ok());
    }

    #[test]
    fn lanczos_agrees_with_libm() {
        for x in [0.1, 0.7, 1.5, 3.25, 10.0, 40.5, -0.3, -2.7] {
            let z = Complex64::new(x, 0.0);
            let (lg, _) = libm::lgamma_r(x);
            assert_relative_eq!(ln_gamma_lanczos(z).re, lg, epsilon = 1e-12);
        }
        // Γ(1+i) Γ(1−i) = π / sinh π
        let a = ln_gamma(Complex64::new(1.0, 1.0)).unwrap() + ln_gamma(Complex64::new(1.0, -1.0)).unwrap();
        assert_relative_eq!(a.re, (PI / PI.sinh()).ln(), epsilon = 1e-13);
        assert!(a.im.abs() < 1e-13);
    }

    #[test]
    fn gamma_step_telescopes() {
        for alg in [sym(3), Algebra::herm(2).unwrap(), Algebra::spin(5).unwrap()] {
            for lam in [2.3, 4.0, 7.75] {
                let a = gamma_cone(&alg, lam + 1.0).unwrap().div(gamma_cone(&alg, lam).unwrap()).value();
                assert_relative_eq!(a, gamma_cone_step(&alg, lam), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn vector_gamma_reductions() {
        let alg = sym(3);
        let lam = Complex64::new(2.7, 0.4);
        let s = [lam; 3];
        assert_eq!(log_gamma_cone_vec(&alg, &s).unwrap(), log_gamma_cone(&alg, lam).unwrap());
        let mu = 3.3;
        let r11 = gamma_cone_shift_ratio(&alg, &MultiIndex::new(alloc::vec![1, 1, 0]).unwrap(), mu).unwrap();
        assert_relative_eq!(r11, mu * (mu - 0.5), max_relative = 1e-12);
        let r20 = gamma_cone_shift_ratio(&alg, &MultiIndex::new(alloc::vec![2, 0, 0]).unwrap(), mu).unwrap();
        assert_relative_eq!(r20, mu * (mu + 1.0), max_relative = 1e-12);
        assert!(MultiIndex::new(alloc::vec![0, 1]).is_err());
    }

    #[test]
    fn moments_sym2_at_2() {
        let alg = sym(2);
        let g = gamma_cone(&alg, 2.0).unwrap();
        assert_relative_eq!(moment_i20(&alg, 2.0).unwrap().div(g).value(), 24.0, max_relative = 1e-14);
        assert_relative_eq!(moment_i11(&alg, 2.0).unwrap().div(g).value(), 6.0, max_relative = 1e-14);
        assert!(moment_i20(&alg, 0.5).is_err());
    }

    #[test]
    fn alpha_beta_sym2_at_2() {
        let ab = alpha_beta(&sym(2), 2.0).unwrap();
        // 1/(2·3·1.5·Γ_Ω(2)) evaluated independently
        let c = 1.0 / (9.0 * (2.0 * PI).sqrt() * PI.sqrt() / 2.0);
        assert_relative_eq!(ab.c.value(), c, max_relative = 1e-14);
        assert_relative_eq!(ab.c.value(), 0.050_017_573_1, max_relative = 1e-9);
        assert_relative_eq!(ab.alpha, 2.0 * ab.c.value(), max_relative = 1e-15);
        assert_relative_eq!(ab.beta, -0.5 * ab.c.value(), max_relative = 1e-15);
        let (a, b) = alpha_beta_system(&sym(2), 2.0).unwrap();
        assert_relative_eq!(a, ab.alpha, max_relative = 1e-10);
        assert_relative_eq!(b, ab.beta, max_relative = 1e-10);
    }

    #[test]
    fn singular_mu_refused() {
        let alg = sym(3);
        for mu in [0.0, -1.0, 0.5, 0.5 + 1e-9] {
            assert_eq!(alpha_beta(&alg, mu), Err(Error::SingularParameter { mu }));
        }
    }

    #[test]
    fn system_determinant() {
        for alg in [sym(2), sym(4), Algebra::herm(3).unwrap(), Algebra::spin(7).unwrap()] {
            let n = alg.dim() as f64;
            for mu in [-1.0, alg.half_d(), 0.3, 2.0, 5.5] {
                let expect = (n - 1.0) * (mu + 1.0) * (mu - alg.half_d());
                assert_relative_eq!(linalg::det(&system_matrix(&alg, mu)), expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn full_system_reduces() {
        // the unreduced rows are (d+2)× the reduced ones
        for alg in [sym(3), Algebra::herm(2).unwrap(), Algebra::spin(6).unwrap()] {
            let d = alg.peirce_d() as f64;
            let mu = 2.9;
            let full = system_matrix_full(&alg, mu);
            let red = system_matrix(&alg, mu);
            assert!(full.sub(&red.scale(d + 2.0)).max_abs() < 1e-11);
        }
    }

    #[test]
    fn riesz_at_unit() {
        let alg = Algebra::herm(3).unwrap();
        let mu = 4.0;
        let rd = riesz_density(mu, &Element::identity(alg)).unwrap();
        let mut vals = rd.operator.eigenvalues().unwrap();
        vals.reverse();
        assert_relative_eq!(vals[0], mu - 3.0, epsilon = 1e-12);
        for v in &vals[1..] {
            assert_relative_eq!(*v, mu, epsilon = 1e-12);
        }
        assert_relative_eq!(rd.prefactor.value(), alpha_beta(&alg, mu).unwrap().c.value(), max_relative = 1e-14);
        assert!(riesz_density(mu, &Element::identity(alg).scale(-1.0)).is_err());
    }

    #[test]
    fn margins() {
        let alg = sym(3);
        let e = Element::identity(alg);
        assert_relative_eq!(positivity_margin(2.0, &e).unwrap(), 0.5, epsilon = 1e-13);
        assert_relative_eq!(positivity_margin(1.4, &e).unwrap(), -0.1, epsilon = 1e-12);
    }

    #[test]
    fn boundary_density_checks() {
        let alg = sym(4);
        assert_relative_eq!(boundary_coefficient(&alg, 2), 0.5);
        let e2 = Element::canonical_partial_unit(alg, 2);
        let rk = boundary_density(2, &e2).unwrap();
        assert!(rk.min_eigenvalue().unwrap().abs() < 1e-14);
        assert!(rk.form(&e2, &e2).unwrap().abs() < 1e-14);
        assert!(matches!(boundary_density(3, &e2), Err(Error::RankMismatch { .. })));
        assert!(matches!(boundary_density(1, &e2), Err(Error::OutOfRange { .. })));
        assert!(matches!(boundary_density(4, &Element::identity(alg)), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn k_invariant_examples() {
        let alg = Algebra::spin(5).unwrap();
        let (a, b, res) = k_invariant_decompose(&LinOp::identity(alg)).unwrap();
        assert_relative_eq!(a, 1.0, epsilon = 1e-14);
        assert!(b.abs() < 1e-14 && res < 1e-14);
        let (a, b, res) = k_invariant_decompose(&Element::identity(alg).rank_one()).unwrap();
        assert!(a.abs() < 1e-14 && res < 1e-13);
        assert_relative_eq!(b, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn obstruction_on_idempotents() {
        let alg = sym(3);
        let c = Element::canonical_idempotent(alg, 1);
        let samples = [c.scale(2.0), c.scale(0.5), Element::canonical_idempotent(alg, 3).scale(1.5)];
        let rep = obstruction_mu_d2(0.7, &samples).unwrap();
        assert_relative_eq!(rep.ratio, 1.0, epsilon = 1e-14);
        assert_relative_eq!(rep.required_ratio, 2.0);
        assert!(rep.ratio_is_one && rep.obstruction);
        // analytic: Tr αP(x) = (αP(x)e|e) = α|x|² for rank one x
        assert_relative_eq!(rep.mean_trace, 0.7 * (4.0 + 0.25 + 2.25) / 3.0, max_relative = 1e-13);
        assert!(matches!(obstruction_mu_d2(0.0, &samples), Err(Error::Degenerate(_))));
        assert!(matches!(obstruction_mu_d2(1.0, &[Element::identity(alg), c]), Err(Error::RankMismatch { .. })));
    }
}
