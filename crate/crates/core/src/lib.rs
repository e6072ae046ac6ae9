//! Rook placements on the staircase board `B_n = {(i, j) : 1 <= i < j <= n}`
//! and what they say about random set partitions and permutations with a
//! prescribed number of components.
//!
//! Placing `r = n - k` non-attacking rooks on `B_n` is in bijection with set
//! partitions of `{1..n}` into `k` blocks (no shared rows or columns) and with
//! permutations of `{1..n}` with `k` cycles (no shared columns). Dropping
//! `r` labeled rooks independently and uniformly on the board and rejecting
//! attacks therefore samples those structures exactly, and the pairwise
//! coincidences between rooks (same row, same column, or one rook's column
//! equal to another's row) drive both the Poisson approximations and the
//! effective Stirling-number bounds implemented here.
//!
//! Modules:
//! - [`stirling`]: exact Stirling numbers and brute-force enumeration oracles
//! - [`rook_board`]: board geometry, attack predicates, both bijections
//! - [`coincidence`]: the iid rook model and its coincidence statistics
//! - [`bounds`]: Chen-Stein, sandwich, Lovász local lemma and Suen bounds
//! - [`spectra`]: block/cycle spectrum laws, rejection sampling, TV distances
//! - [`interval`]: outward-rounded arbitrary-precision interval arithmetic

use std::fmt;
use std::str::FromStr;

pub mod bounds;
pub mod coincidence;
pub mod error;
pub mod interval;
pub mod law;
pub mod rook_board;
pub mod sampling;
pub mod spectra;
pub mod stirling;
pub mod structures;

pub use error::{Error, Result};
pub use interval::RealInterval;
pub use law::{tv_discrete, FiniteLaw};
pub use structures::{CyclePermutation, SetPartition, SpectrumLaw, SpectrumVector, Structure};

/// Arbitrary-precision integer.
pub type ExactInteger = num_bigint::BigInt;
/// Exact rational number.
pub type ExactRational = num_rational::BigRational;

/// Which combinatorial structure the rooks encode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    /// Set partitions; rooks attack along rows and columns.
    Partition,
    /// Permutations in cycle form; rooks attack along columns only.
    Permutation,
}

/// Stirling number kind. First kind is unsigned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    First,
    Second,
}

impl Model {
    /// The Stirling kind counting this model's structures.
    pub fn kind(self) -> Kind {
        match self {
            Model::Partition => Kind::Second,
            Model::Permutation => Kind::First,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Model::Partition => "partition",
            Model::Permutation => "permutation",
        }
    }
}

impl Kind {
    pub fn model(self) -> Model {
        match self {
            Kind::First => Model::Permutation,
            Kind::Second => Model::Partition,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::First => "first",
            Kind::Second => "second",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "partition" => Ok(Model::Partition),
            "permutation" => Ok(Model::Permutation),
            other => Err(Error::parse("model", format!("unknown model {other:?}"))),
        }
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Kind::First),
            "second" => Ok(Kind::Second),
            other => Err(Error::parse("kind", format!("unknown kind {other:?}"))),
        }
    }
}
