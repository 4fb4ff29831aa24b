use cone_lab_core::jordan::random;
use cone_lab_core::linalg::{self, CMatrix};
use cone_lab_core::mc::{self, RieszSampler};
use cone_lab_core::special;
use cone_lab_core::tube::{self, LogDetMethod, TubePoint};
use cone_lab_core::{Algebra, Element, LinOp};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn algebras() -> Vec<Algebra> {
    vec![
        Algebra::sym(2).unwrap(),
        Algebra::sym(3).unwrap(),
        Algebra::sym(4).unwrap(),
        Algebra::herm(2).unwrap(),
        Algebra::herm(3).unwrap(),
        Algebra::spin(3).unwrap(),
        Algebra::spin(5).unwrap(),
        Algebra::spin(8).unwrap(),
    ]
}

fn algebra() -> impl Strategy<Value = Algebra> {
    prop::sample::select(algebras())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn op_rel(a: &LinOp, b: &LinOp) -> f64 {
    a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm().max(1e-300)
}

fn el_rel(a: &Element, b: &Element) -> f64 {
    a.sub(b).unwrap().norm() / b.norm().max(1e-300)
}

fn cmat_rel(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).frobenius_norm() / b.frobenius_norm().max(1e-300)
}

fn tube_point(alg: Algebra, rng: &mut ChaCha8Rng) -> TubePoint {
    TubePoint::from_parts(random::gaussian(alg, rng), random::cone_point(alg, 1.0, rng)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn coords_roundtrip(alg in algebra(), seed in any::<u64>()) {
        let x = random::gaussian(alg, &mut ChaCha8Rng::seed_from_u64(seed));
        let c = x.to_coords();
        prop_assert_eq!(Element::from_coords(alg, &c).unwrap().to_coords(), c);
    }

    #[test]
    fn power_associative(alg in algebra(), seed in any::<u64>()) {
        let x = random::gaussian(alg, &mut ChaCha8Rng::seed_from_u64(seed));
        let lhs = x.square().jordan_mul(&x).unwrap();
        let rhs = x.quad_apply(&x).unwrap();
        prop_assert!(el_rel(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn quad_rep_is_multiplicative(alg in algebra(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::cone_point(alg, 1.0, &mut rng);
        let x = random::gaussian(alg, &mut rng);
        let l = a.quad_rep();
        let lhs = a.quad_apply(&x).unwrap().quad_rep();
        let rhs = l.compose(&x.quad_rep()).unwrap().compose(&l.transpose()).unwrap();
        prop_assert!(op_rel(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn determinant_character(alg in algebra(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::cone_point(alg, 1.0, &mut rng);
        let x = random::gaussian(alg, &mut rng);
        let lhs = a.quad_apply(&x).unwrap().det();
        let rhs = a.det().powi(2) * x.det();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        let n_over_r = alg.n_over_r();
        prop_assert!(rel(a.quad_rep().det(), a.det().powf(2.0 * n_over_r)) < 1e-10);
    }

    #[test]
    fn jordan_inverse(alg in algebra(), seed in any::<u64>()) {
        let x = random::gaussian(alg, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assume!(x.det().abs() > 1e-3);
        let xi = x.inverse().unwrap();
        prop_assert!(el_rel(&x.quad_apply(&xi).unwrap(), &x) < 1e-10);
        prop_assert!(el_rel(&x.jordan_mul(&xi).unwrap(), &Element::identity(alg)) < 1e-10);
    }

    #[test]
    fn trace_identities(alg in algebra(), seed in any::<u64>()) {
        let x = random::gaussian(alg, &mut ChaCha8Rng::seed_from_u64(seed));
        let d = alg.peirce_d() as f64;
        let (p20, p11) = x.invariant_polys();
        let k = 2.0 / (d + 2.0);
        let e = Element::identity(alg);
        let p = x.quad_rep();
        let q = x.rank_one();
        prop_assert!(rel(p.trace(), k * (p20 + d * d / 4.0 * p11)) < 1e-10);
        prop_assert!(rel(p.form(&e, &e).unwrap(), k * (p20 - d / 2.0 * p11)) < 1e-10);
        prop_assert!(rel(q.trace(), k * (p20 - d / 2.0 * p11)) < 1e-10);
        prop_assert!(rel(q.form(&e, &e).unwrap(), k * (p20 + p11)) < 1e-10);
    }

    #[test]
    fn peirce_scaling(alg in algebra(), seed in any::<u64>(), s in 0.1f64..3.0) {
        let x = random::gaussian(alg, &mut ChaCha8Rng::seed_from_u64(seed));
        let frame = x.spectral().unwrap().frame;
        let c = frame[0].clone();
        let (p1, ph, p0) = c.peirce_projectors().unwrap();
        let e = Element::identity(alg);
        let ls = c.add(&e.sub(&c).unwrap().scale(s)).unwrap().quad_rep();
        let expect = p1.add(&ph.scale(s)).unwrap().add(&p0.scale(s * s)).unwrap();
        prop_assert!(op_rel(&ls, &expect) < 1e-10);
    }

    #[test]
    fn spectral_frame_axioms(alg in algebra(), seed in any::<u64>()) {
        let x = random::gaussian(alg, &mut ChaCha8Rng::seed_from_u64(seed));
        let sd = x.spectral().unwrap();
        prop_assert!(sd.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(el_rel(&sd.reconstruct(), &x) < 1e-12);
        let mut sum = Element::zero(alg);
        for (i, ci) in sd.frame.iter().enumerate() {
            prop_assert!(ci.square().sub(ci).unwrap().norm() < 1e-10);
            prop_assert!((ci.trace() - 1.0).abs() < 1e-10);
            for cj in &sd.frame[i + 1..] {
                prop_assert!(ci.jordan_mul(cj).unwrap().norm() < 1e-10);
            }
            sum = sum.add(ci).unwrap();
        }
        prop_assert!(sum.sub(&Element::identity(alg)).unwrap().norm() < 1e-10);
    }

    #[test]
    fn gamma_ratio_telescopes(alg in algebra(), lam in 0.0f64..12.0) {
        let lam = lam + alg.rank() as f64 * alg.half_d();
        let a = special::gamma_cone(&alg, lam + 1.0).unwrap();
        let b = special::gamma_cone(&alg, lam).unwrap();
        prop_assert!(rel(a.div(b).value(), special::gamma_cone_step(&alg, lam)) < 1e-12);
    }

    #[test]
    fn alpha_beta_matches_system(alg in algebra(), mu in 0.05f64..15.0) {
        let mu = mu + (alg.rank() as f64 - 1.0) * alg.half_d();
        prop_assume!((mu - alg.half_d()).abs() > 1e-3);
        let ab = special::alpha_beta(&alg, mu).unwrap();
        let (a, b) = special::alpha_beta_system(&alg, mu).unwrap();
        prop_assert!(rel(a, ab.alpha) < 1e-10);
        prop_assert!(rel(b, ab.beta) < 1e-10);
        let det = linalg::det(&special::system_matrix(&alg, mu));
        let (n, hd) = (alg.dim() as f64, alg.half_d());
        prop_assert!(rel(det, (n - 1.0) * (mu + 1.0) * (mu - hd)) < 1e-10);
    }

    #[test]
    fn riesz_density_covariance(alg in algebra(), seed in any::<u64>(), mu in 0.5f64..6.0) {
        let mu = mu + alg.rank() as f64 * alg.half_d();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::cone_point(alg, 0.5, &mut rng);
        let y = random::cone_point(alg, 0.5, &mut rng);
        let l = a.quad_rep();
        let lhs = special::riesz_density(mu, &a.quad_apply(&y).unwrap()).unwrap().value();
        let inner = special::riesz_density(mu, &y).unwrap().value();
        let rhs = l.compose(&inner).unwrap().compose(&l.transpose()).unwrap().scale(a.det().powf(2.0 * mu));
        prop_assert!(op_rel(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn margin_nonnegative_at_threshold(alg in algebra(), seed in any::<u64>()) {
        let y = random::cone_point(alg, 2.0, &mut ChaCha8Rng::seed_from_u64(seed));
        let mu = alg.rank() as f64 * alg.half_d();
        let scale = y.quad_rep().frobenius_norm();
        prop_assert!(special::positivity_margin(mu, &y).unwrap() >= -1e-12 * scale);
    }

    #[test]
    fn boundary_density_psd(seed in any::<u64>(), k in 2usize..4) {
        let alg = Algebra::sym(4).unwrap();
        let y = mc::sample_orbit(alg, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let q = special::boundary_density(k, &y).unwrap();
        prop_assert!(q.min_eigenvalue().unwrap() >= -1e-12 * q.frobenius_norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_hermitian_and_translation_invariant(alg in algebra(), seed in any::<u64>(), mu in -2.0f64..6.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = tube_point(alg, &mut rng);
        let w = tube_point(alg, &mut rng);
        let q = tube::kernel_q(mu, &z, &w).unwrap();
        let qt = tube::kernel_q(mu, &w, &z).unwrap();
        prop_assert!(cmat_rel(&q.adjoint().into_matrix(), qt.as_matrix()) < 1e-10);
        let a = random::gaussian(alg, &mut rng);
        let za = tube::translate(&z, &a).unwrap();
        let wa = tube::translate(&w, &a).unwrap();
        prop_assert!(cmat_rel(tube::kernel_q(mu, &za, &wa).unwrap().as_matrix(), q.as_matrix()) < 1e-10);
    }

    #[test]
    fn kernel_l_covariance(alg in algebra(), seed in any::<u64>(), mu in -2.0f64..6.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = tube_point(alg, &mut rng);
        let w = tube_point(alg, &mut rng);
        let a = random::cone_point(alg, 0.6, &mut rng);
        let lhs = tube::kernel_q(mu, &tube::act_quad(&a, &z).unwrap(), &tube::act_quad(&a, &w).unwrap()).unwrap();
        let li = a.quad_rep().inverse().unwrap().to_complex();
        let rhs = li
            .transpose()
            .compose(&tube::kernel_q(mu, &z, &w).unwrap())
            .unwrap()
            .compose(&li)
            .unwrap()
            .scale(Complex64::new(a.det().powf(-2.0 * mu), 0.0));
        prop_assert!(cmat_rel(lhs.as_matrix(), rhs.as_matrix()) < 1e-9);
    }

    #[test]
    fn log_det_branch(alg in algebra(), seed in any::<u64>(), spread in 0.0f64..6.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = tube_point(alg, &mut rng);
        let w = tube::translate(&tube_point(alg, &mut rng), &random::gaussian(alg, &mut rng).scale(spread)).unwrap();
        let a = tube::log_det_tube_with(&z, &w, LogDetMethod::Spectral).unwrap();
        let b = tube::log_det_tube_with(&z, &w, LogDetMethod::Continuation).unwrap();
        prop_assert!((a - b).norm() <= 1e-9);
        let diag = tube::log_det_tube(&z, &z).unwrap();
        prop_assert!(diag.im == 0.0 || diag.im.abs() < 1e-14);
        prop_assert!((diag.re - z.im().det().ln()).abs() < 1e-12);
    }

    #[test]
    fn single_point_gram_is_positive(alg in algebra(), seed in any::<u64>(), mu in -5.0f64..8.0) {
        let z = tube_point(alg, &mut ChaCha8Rng::seed_from_u64(seed));
        let c = tube::gram(mu, &[z], tube::GramTolerances::default()).unwrap();
        prop_assert!(c.min_eigenvalue > 0.0);
    }

    #[test]
    fn estimates_are_reproducible(seed in any::<u64>(), n in 2u64..9000) {
        let alg = Algebra::sym(2).unwrap();
        let s = RieszSampler::new(alg, 2.0).unwrap();
        let f = |y: &Element| Ok(y.quad_rep());
        let a = mc::estimate_operator_mean(&s, &f, n, seed).unwrap();
        let b = mc::estimate_operator_mean(&s, &f, n, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.stderr.as_slice().iter().all(|&x| x >= 0.0));
        prop_assert_eq!(a.samples, n);
    }
}

#[test]
fn riesz_identity_scalar_parts() {
    for alg in algebras() {
        for mu in [2.0, 3.7, 10.0] {
            let mu = mu + (alg.rank() as f64 - 1.0) * alg.half_d();
            let m = special::trace_moments(&alg, mu).unwrap();
            let ab = special::alpha_beta(&alg, mu).unwrap();
            let g = special::gamma_cone(&alg, mu).unwrap().value();
            let (n, r) = (alg.dim() as f64, alg.rank() as f64);
            let tr = g * (ab.alpha * m.tr_p + ab.beta * m.tr_rank_one);
            let ee = g * (ab.alpha * m.p_ee + ab.beta * m.rank_one_ee);
            assert!(rel(tr, n) < 1e-10, "{alg} {mu}: {tr}");
            assert!(rel(ee, r) < 1e-10, "{alg} {mu}: {ee}");
        }
    }
}
