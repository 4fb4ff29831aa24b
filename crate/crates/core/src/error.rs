use alloc::boxed::Box;

use crate::jordan::Algebra;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("algebra mismatch: {left} vs {right}")]
    DescriptorMismatch { left: Algebra, right: Algebra },
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(&'static str),
    #[error("coordinate vector has length {found}, expected {expected}")]
    CoordinateLength { expected: usize, found: usize },
    #[error("storage does not respect the family symmetry")]
    Storage,
    #[error("singular element (|det| = {det:e})")]
    Singular { det: f64 },
    #[error("element is not in the open cone (smallest eigenvalue {min_eigenvalue:e})")]
    NotInCone { min_eigenvalue: f64 },
    #[error("element is not in the closed cone (smallest eigenvalue {min_eigenvalue:e})")]
    NotInClosure { min_eigenvalue: f64 },
    #[error("element is not idempotent (defect {defect:e})")]
    NotIdempotent { defect: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },
    #[error("Gamma pole in factor j = {index}")]
    Pole { index: usize },
    #[error("parameter outside its domain: {0}")]
    Domain(&'static str),
    #[error("mu = {mu} is a singular parameter")]
    SingularParameter { mu: f64 },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange { what: &'static str, value: i64, lo: i64, hi: i64 },
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("point is not in the tube domain")]
    NotInTube,
    #[error("Cayley map needs spectral norm < 1, got {norm}")]
    CayleyDomain { norm: f64 },
    #[error("quadrature did not reach tolerance (error estimate {estimate:e})")]
    QuadratureFailed { estimate: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("evaluation failed at sample {index}: {inner}")]
    Evaluation { index: u64, inner: Box<Error> },
}
