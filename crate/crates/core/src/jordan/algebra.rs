use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Simple Euclidean Jordan algebra families supported here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Family {
    /// Real symmetric r×r matrices, d = 1.
    SymR,
    /// Complex Hermitian r×r matrices, d = 2.
    HermC,
    /// Spin factor R × R^{n-1}, rank 2, d = n − 2.
    Spin,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::SymR => "symr",
            Family::HermC => "hermc",
            Family::Spin => "spin",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "symr" | "sym" => Ok(Family::SymR),
            "hermc" | "herm" => Ok(Family::HermC),
            "spin" => Ok(Family::Spin),
            _ => Err(Error::InvalidAlgebra("unknown family")),
        }
    }
}

/// Descriptor of a simple algebra: family, rank `r`, dimension `n`, Peirce constant `d`.
///
/// `n = r + r(r−1)d/2` always holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Algebra {
    family: Family,
    r: usize,
    n: usize,
    d: usize,
}

impl Algebra {
    /// Builds a descriptor. For matrix families `r_or_n` is the rank; for the
    /// spin factor it is the dimension `n ≥ 3`.
    pub fn new(family: Family, r_or_n: usize) -> Result<Self> {
        match family {
            Family::SymR | Family::HermC => {
                let r = r_or_n;
                if r < 2 {
                    return Err(Error::InvalidAlgebra("rank must be at least 2"));
                }
                let d = if family == Family::SymR { 1 } else { 2 };
                Ok(Self { family, r, n: r + r * (r - 1) * d / 2, d })
            }
            Family::Spin => {
                let n = r_or_n;
                if n < 3 {
                    return Err(Error::InvalidAlgebra("spin factor dimension must be at least 3"));
                }
                Ok(Self { family, r: 2, n, d: n - 2 })
            }
        }
    }

    pub fn sym(r: usize) -> Result<Self> {
        Self::new(Family::SymR, r)
    }

    pub fn herm(r: usize) -> Result<Self> {
        Self::new(Family::HermC, r)
    }

    pub fn spin(n: usize) -> Result<Self> {
        Self::new(Family::Spin, n)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn peirce_d(&self) -> usize {
        self.d
    }

    /// `d/2` as a float.
    pub fn half_d(&self) -> f64 {
        self.d as f64 / 2.0
    }

    /// `n/r`, the exponent in `Det ℓ = χ(ℓ)^{n/r}`.
    pub fn n_over_r(&self) -> f64 {
        self.n as f64 / self.r as f64
    }

    /// The size parameter used in strings: rank for matrix families, `n` for spin.
    pub fn size_param(&self) -> usize {
        match self.family {
            Family::Spin => self.n,
            _ => self.r,
        }
    }

    pub(crate) fn check_same(&self, other: &Algebra) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch { left: *self, right: *other })
        }
    }
}

/// Same as [`Algebra::new`].
pub fn make_algebra(family: Family, r_or_n: usize) -> Result<Algebra> {
    Algebra::new(family, r_or_n)
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family, self.size_param())
    }
}

/// Parses `symr:3`, `hermc:2`, `spin:5`.
impl FromStr for Algebra {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (fam, size) = s.split_once(':').ok_or(Error::InvalidAlgebra("expected <family>:<size>"))?;
        let size: usize = size.trim().parse().map_err(|_| Error::InvalidAlgebra("size is not an integer"))?;
        Algebra::new(fam.parse()?, size)
    }
}
