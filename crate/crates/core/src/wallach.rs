//! The predicted set of parameters for which `Q_μ` is positive-definite:
//! `{kd/2 : 2 ≤ k ≤ r−1} ∪ [rd/2, ∞)`.

use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use crate::jordan::Algebra;

/// Tolerance for recognising a lattice point `kd/2`.
pub const LATTICE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WallachSet {
    pub algebra: Algebra,
    /// Isolated points `kd/2`, `k = 2..r−1`.
    pub discrete: Vec<f64>,
    /// `rd/2`.
    pub threshold: f64,
}

impl WallachSet {
    pub fn new(alg: Algebra) -> Self {
        let hd = alg.half_d();
        let r = alg.rank();
        Self { algebra: alg, discrete: (2..r).map(|k| k as f64 * hd).collect(), threshold: r as f64 * hd }
    }

    pub fn contains(&self, mu: f64) -> bool {
        mu >= self.threshold - LATTICE_TOL || self.discrete.iter().any(|p| (mu - p).abs() <= LATTICE_TOL)
    }
}

impl fmt::Display for WallachSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.discrete.is_empty() {
            write!(f, "{{")?;
            for (i, p) in self.discrete.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, "}} ∪ ")?;
        }
        write!(f, "[{}, ∞)", self.threshold)
    }
}

/// Whether `μ` lies in the predicted set.
pub fn predicted_member(alg: &Algebra, mu: f64) -> bool {
    WallachSet::new(*alg).contains(mu)
}

/// `Some(k)` when `μ = kd/2` for an integer `k ≥ 0`.
pub fn lattice_index(alg: &Algebra, mu: f64) -> Option<u32> {
    let k = mu / alg.half_d();
    let kr = k.round();
    (kr >= 0.0 && (k - kr).abs() * alg.half_d() <= LATTICE_TOL).then_some(kr as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    #[test]
    fn symr3_grid() {
        let alg = Algebra::sym(3).unwrap();
        let got: Vec<bool> = [0.3, 0.75, 1.0, 1.25, 1.5, 2.5].iter().map(|&m| predicted_member(&alg, m)).collect();
        assert_eq!(got, vec![false, false, true, false, true, true]);
        assert_eq!(format!("{}", WallachSet::new(alg)), "{1} ∪ [1.5, ∞)");
    }

    #[test]
    fn spin5_has_no_discrete_part() {
        let alg = Algebra::spin(5).unwrap();
        let w = WallachSet::new(alg);
        assert!(w.discrete.is_empty());
        assert_eq!(w.threshold, 3.0);
        assert!(!w.contains(2.9));
        assert!(w.contains(3.0));
        assert_eq!(lattice_index(&alg, 3.0), Some(2));
        assert_eq!(lattice_index(&alg, 2.9), None);
    }

    #[test]
    fn herm4_lattice() {
        let w = WallachSet::new(Algebra::herm(4).unwrap());
        assert_eq!(w.discrete, vec![2.0, 3.0]);
        assert!(!w.contains(0.0));
        assert!(!w.contains(1.0));
        assert!(!w.contains(3.5));
        assert!(w.contains(4.0));
    }
}
