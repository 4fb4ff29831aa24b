//! Random test points. Used by property tests and by the scan drivers.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Algebra, ComplexElement, Element};

/// Element with i.i.d. standard normal coordinates.
pub fn gaussian<R: Rng + ?Sized>(alg: Algebra, rng: &mut R) -> Element {
    let c: Vec<f64> = (0..alg.dim()).map(|_| StandardNormal.sample(rng)).collect();
    Element::from_coords(alg, &c).expect("coordinate length")
}

/// `exp(s·g)` for a Gaussian element `g` normalised to unit length: a cone
/// point with eigenvalues in `[e^{−s}, e^{s}]`.
pub fn cone_point<R: Rng + ?Sized>(alg: Algebra, spread: f64, rng: &mut R) -> Element {
    let g = gaussian(alg, rng);
    let g = g.scale(spread / g.norm().max(f64::MIN_POSITIVE));
    g.map_spectrum(|l| l.exp()).expect("spectral decomposition of a finite element")
}

/// Complex element with spectral norm `radius·U^{1/n}`, `U` uniform.
pub fn ball_point<R: Rng + ?Sized>(alg: Algebra, radius: f64, rng: &mut R) -> ComplexElement {
    let c: Vec<Complex64> =
        (0..alg.dim()).map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect();
    let z = ComplexElement::from_coords(alg, &c).expect("coordinate length");
    let norm = z.spectral_norm().expect("finite element").max(f64::MIN_POSITIVE);
    let u: f64 = rng.random();
    z.scale(Complex64::new(radius * u.powf(1.0 / alg.dim() as f64) / norm, 0.0))
}
