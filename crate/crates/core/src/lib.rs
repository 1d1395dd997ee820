//! Third unramified cohomology of norm-one tori for abelian extensions.
//!
//! The computation is split into exact integer linear algebra
//! ([`zlinalg`]), finite groups ([`groups`]), lattices with a group action
//! ([`glattice`]), group cohomology through free resolutions
//! ([`cohomres`]), the decomposable subgroup of symmetric squares
//! ([`decomp`]), the arithmetic summand from local degrees
//! ([`classfield`]) and the assembled pipeline ([`h3nr`]).

pub mod classfield;
pub mod cohomres;
pub mod decomp;
pub mod glattice;
pub mod groups;
pub mod h3nr;
pub mod zlinalg;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("sublattice not contained: {0}")]
    NotContained(String),
    #[error("cost bound exceeded: {0}")]
    CostBound(String),
    #[error("degree {degree} out of range (maximum {max})")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
