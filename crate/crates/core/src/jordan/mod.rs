//! Simple Euclidean Jordan algebras, their complexifications and linear
//! operators on them.

mod algebra;
mod complex;
mod element;
mod linop;
pub mod random;

pub use algebra::{make_algebra, Algebra, Family};
pub use complex::ComplexElement;
pub use element::{Element, SpectralDecomposition, IDEMPOTENT_TOL, RANK_TOL, SINGULAR_TOL};
pub use linop::{ComplexLinOp, LinOp};
