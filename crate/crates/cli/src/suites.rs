//! Deterministic (non-Monte Carlo) identity suites.

use cone_lab_core::jordan::random;
use cone_lab_core::linalg;
use cone_lab_core::special;
use cone_lab_core::tube::{self, LogDetMethod, TubePoint};
use cone_lab_core::{Algebra, Element, LinOp};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ScanConfig;
use crate::report::IdentityCheck;

/// Running maximum of an error metric. NaN and evaluation failures record
/// `f64::MAX`, which stays representable in JSON.
struct Tracker {
    name: &'static str,
    tol: f64,
    cases: usize,
    max: f64,
}

impl Tracker {
    fn new(name: &'static str, tol: f64) -> Self {
        Self { name, tol, cases: 0, max: 0.0 }
    }

    fn record(&mut self, err: f64) {
        self.cases += 1;
        let err = if err.is_finite() { err } else { f64::MAX };
        self.max = self.max.max(err);
    }

    fn finish(self, alg: &Algebra) -> IdentityCheck {
        IdentityCheck {
            algebra: alg.to_string(),
            name: self.name.to_string(),
            cases: self.cases,
            max_error: self.max,
            tol: self.tol,
            pass: self.max <= self.tol,
        }
    }
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / b.abs().max(scale).max(f64::MIN_POSITIVE)
}

fn el_rel(a: &Element, b: &Element) -> f64 {
    a.sub(b).map(|d| d.norm() / b.norm().max(f64::MIN_POSITIVE)).unwrap_or(f64::MAX)
}

fn op_rel(a: &LinOp, b: &LinOp) -> f64 {
    a.sub(b).map(|d| d.frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)).unwrap_or(f64::MAX)
}

/// Gaussian element whose eigenvalues stay at least 5% of the largest in magnitude,
/// so that inverses and determinants are well conditioned.
fn conditioned(alg: Algebra, rng: &mut ChaCha8Rng) -> Element {
    loop {
        let x = random::gaussian(alg, rng);
        let ev = x.eigenvalues().expect("finite element");
        let mx = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mn = ev.iter().fold(f64::MAX, |m, v| m.min(v.abs()));
        if mn >= 0.05 * mx {
            return x;
        }
    }
}

fn algebra_suite(alg: Algebra, cfg: &ScanConfig, seed: u64, stream: u64) -> Vec<IdentityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let tol = &cfg.tol;
    let e = Element::identity(alg);
    let (n, r) = (alg.dim() as f64, alg.rank() as f64);
    let d = alg.peirce_d() as f64;
    let k = 2.0 / (d + 2.0);

    let mut quad_inv = Tracker::new("quad_rep_inverse", tol.identity);
    let mut jordan_inv = Tracker::new("jordan_inverse", tol.identity);
    let mut det_char = Tracker::new("det_character", tol.identity);
    let mut det_quad = Tracker::new("det_quad_rep", tol.identity);
    let mut tr_trace = Tracker::new("trace_identity_tr_p", tol.identity);
    let mut tr_form = Tracker::new("trace_identity_p_ee", tol.identity);
    let mut tr_rank = Tracker::new("trace_identity_tr_rank_one", tol.identity);
    let mut tr_rank_form = Tracker::new("trace_identity_rank_one_ee", tol.identity);
    let mut peirce = Tracker::new("peirce_scaling", tol.identity);
    let mut power = Tracker::new("power_associativity", tol.identity);
    let mut spectral = Tracker::new("spectral_reconstruction", tol.identity);

    for _ in 0..cfg.identity_points {
        let x = conditioned(alg, &mut rng);
        let a = random::cone_point(alg, 1.0, &mut rng);
        match x.inverse() {
            Ok(xi) => {
                quad_inv.record(x.quad_apply(&xi).map(|v| el_rel(&v, &x)).unwrap_or(f64::MAX));
                jordan_inv.record(x.jordan_mul(&xi).map(|v| el_rel(&v, &e)).unwrap_or(f64::MAX));
            }
            Err(_) => {
                quad_inv.record(f64::MAX);
                jordan_inv.record(f64::MAX);
            }
        }
        let px = a.quad_apply(&x).expect("same algebra");
        det_char.record(rel(px.det(), a.det().powi(2) * x.det(), 0.0));
        det_quad.record(rel(a.quad_rep().det(), a.det().powf(2.0 * n / r), 0.0));

        let (p20, p11) = x.invariant_polys();
        let scale = x.norm().powi(2);
        let p = x.quad_rep();
        let q = x.rank_one();
        tr_trace.record(rel(p.trace(), k * (p20 + d * d / 4.0 * p11), scale));
        tr_form.record(rel(p.form(&e, &e).unwrap_or(f64::NAN), k * (p20 - d / 2.0 * p11), scale));
        tr_rank.record(rel(q.trace(), k * (p20 - d / 2.0 * p11), scale));
        tr_rank_form.record(rel(q.form(&e, &e).unwrap_or(f64::NAN), k * (p20 + p11), scale));

        power.record(el_rel(&x.square().jordan_mul(&x).expect("same algebra"), &p.apply(&x).expect("same algebra")));

        let sd = x.spectral().expect("finite element");
        spectral.record(el_rel(&sd.reconstruct(), &x));

        // ℓ_s = P(c + s(e − c)) acts as 1, s, s² on the Peirce spaces of c
        let s: f64 = rng.random_range(0.2..3.0);
        let idempotents =
            [sd.frame[0].clone(), Element::canonical_partial_unit(alg, 1 + stream as usize % (alg.rank() - 1))];
        for c in idempotents {
            let (p1, ph, p0) = c.peirce_projectors().expect("idempotent");
            let ls = c.add(&e.sub(&c).expect("same algebra").scale(s)).expect("same algebra").quad_rep();
            let expect = p1.add(&ph.scale(s)).and_then(|m| m.add(&p0.scale(s * s))).expect("same algebra");
            peirce.record(op_rel(&ls, &expect));
        }
    }

    let mut ab = Tracker::new("alpha_beta_system", tol.identity);
    let mut sysdet = Tracker::new("system_determinant", tol.identity);
    let mut gamma = Tracker::new("gamma_telescoping", tol.gamma);
    let lo = (r - 1.0) * alg.half_d();
    let mut drawn = 0;
    while drawn < 20 {
        let mu = lo + rng.random_range(0.05..10.0);
        if (mu - alg.half_d()).abs() < 1e-3 {
            continue;
        }
        drawn += 1;
        match (special::alpha_beta(&alg, mu), special::alpha_beta_system(&alg, mu)) {
            (Ok(c), Ok((a, b))) => ab.record(rel(a, c.alpha, 0.0).max(rel(b, c.beta, 0.0))),
            _ => ab.record(f64::MAX),
        }
        let det = linalg::det(&special::system_matrix(&alg, mu));
        sysdet.record(rel(det, (n - 1.0) * (mu + 1.0) * (mu - alg.half_d()), 0.0));
        let ratio =
            special::gamma_cone(&alg, mu + 1.0).and_then(|g1| special::gamma_cone(&alg, mu).map(|g0| g1.div(g0)));
        gamma.record(ratio.map(|v| rel(v.value(), special::gamma_cone_step(&alg, mu), 0.0)).unwrap_or(f64::MAX));
    }

    let mut riesz_tr = Tracker::new("riesz_identity_trace", tol.identity);
    let mut riesz_ee = Tracker::new("riesz_identity_unit", tol.identity);
    for mu in [2.0, 3.7, 10.0] {
        let mu = if mu > lo { mu } else { mu + lo };
        let res = special::trace_moments(&alg, mu).and_then(|m| {
            let c = special::alpha_beta(&alg, mu)?;
            let g = special::gamma_cone(&alg, mu)?.value();
            Ok((g * (c.alpha * m.tr_p + c.beta * m.tr_rank_one), g * (c.alpha * m.p_ee + c.beta * m.rank_one_ee)))
        });
        match res {
            Ok((tr, ee)) => {
                riesz_tr.record(rel(tr, n, 0.0));
                riesz_ee.record(rel(ee, r, 0.0));
            }
            Err(_) => {
                riesz_tr.record(f64::MAX);
                riesz_ee.record(f64::MAX);
            }
        }
    }

    let mut herm = Tracker::new("kernel_hermitian_symmetry", tol.kernel);
    let mut lcov = Tracker::new("kernel_l_covariance", tol.kernel);
    let mut logdet = Tracker::new("log_det_dual_methods", tol.kernel);
    let pairs = (cfg.identity_points / 20).max(10);
    for _ in 0..pairs {
        let mu: f64 = rng.random_range(-2.0..6.0);
        let z = TubePoint::from_parts(random::gaussian(alg, &mut rng), random::cone_point(alg, 1.0, &mut rng))
            .expect("cone point");
        let w =
            TubePoint::from_parts(random::gaussian(alg, &mut rng).scale(3.0), random::cone_point(alg, 1.0, &mut rng))
                .expect("cone point");
        let a = random::cone_point(alg, 0.6, &mut rng);
        let res = (|| -> cone_lab_core::Result<(f64, f64, f64)> {
            let q = tube::kernel_q(mu, &z, &w)?;
            let qt = tube::kernel_q(mu, &w, &z)?;
            let h = q.adjoint().sub(&qt)?.frobenius_norm() / qt.frobenius_norm();
            let lhs = tube::kernel_q(mu, &tube::act_quad(&a, &z)?, &tube::act_quad(&a, &w)?)?;
            let li = a.quad_rep().inverse()?.to_complex();
            let rhs = li.transpose().compose(&q)?.compose(&li)?.scale(Complex64::new(a.det().powf(-2.0 * mu), 0.0));
            let l = lhs.sub(&rhs)?.frobenius_norm() / rhs.frobenius_norm();
            let sa = tube::log_det_tube_with(&z, &w, LogDetMethod::Spectral)?;
            let sb = tube::log_det_tube_with(&z, &w, LogDetMethod::Continuation)?;
            Ok((h, l, (sa - sb).norm()))
        })();
        let (h, l, g) = res.unwrap_or((f64::MAX, f64::MAX, f64::MAX));
        herm.record(h);
        lcov.record(l);
        logdet.record(g);
    }

    [
        quad_inv,
        jordan_inv,
        det_char,
        det_quad,
        tr_trace,
        tr_form,
        tr_rank,
        tr_rank_form,
        peirce,
        power,
        spectral,
        ab,
        sysdet,
        gamma,
        riesz_tr,
        riesz_ee,
        herm,
        lcov,
        logdet,
    ]
    .into_iter()
    .map(|t| t.finish(&alg))
    .collect()
}

/// Default algebras of the identity suite.
pub const DEFAULT_ALGEBRAS: [&str; 8] =
    ["symr:2", "symr:3", "symr:4", "hermc:2", "hermc:3", "spin:3", "spin:5", "spin:8"];

/// Runs every suite over every configured algebra; one stream per algebra.
pub fn run(cfg: &ScanConfig) -> anyhow::Result<Vec<IdentityCheck>> {
    use rayon::prelude::*;
    let seed = cfg.seed()?;
    let algs = cfg.parsed_algebras()?;
    let per: Vec<Vec<IdentityCheck>> =
        algs.par_iter().enumerate().map(|(i, alg)| algebra_suite(*alg, cfg, seed, i as u64)).collect();
    Ok(per.into_iter().flatten().collect())
}
