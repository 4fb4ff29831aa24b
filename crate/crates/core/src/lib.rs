//! Euclidean Jordan algebras, their symmetric cones and the analysis built on
//! top of them: cone Gamma functions, operator-valued Riesz densities,
//! reproducing kernels on the tube domain, and Monte Carlo / quadrature
//! estimators for the associated integrals.
//!
//! Three simple families are covered: real symmetric matrices, complex
//! Hermitian matrices and spin factors. Elements are stored in their natural
//! matrix or `(t, u)` form; operators act on coordinates in a fixed
//! orthonormal basis for the trace form `(x|y) = tr(x∘y)`, documented on
//! [`jordan::Element::to_coords`].
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
// NaN must fail range checks, so `!(x > lo)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod jordan;
pub mod linalg;
pub mod mc;
pub mod special;
pub mod tube;
pub mod wallach;

pub use error::{Error, Result};
pub use jordan::{Algebra, ComplexElement, ComplexLinOp, Element, Family, LinOp, SpectralDecomposition};
