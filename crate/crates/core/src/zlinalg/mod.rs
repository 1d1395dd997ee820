//! Exact integer linear algebra.

pub mod abgroup;
pub mod hermite;
pub mod int;
pub mod matrix;
pub mod smith;
pub mod sparse;

pub use abgroup::{cokernel, hom_kernel, is_prime, p_primary, prime_factors, subquotient, FgAbGroup};
pub use hermite::{coordinates_in, hermite_normal_form, kernel_basis, saturate, solve, HermiteBasis};
pub use int::Int;
pub use matrix::IntMatrix;
pub use smith::{smith_diagonal, smith_left, smith_normal_form, SmithForm};
pub use sparse::{sparse_cokernel, sparse_rank, SparseVec, UnitReduced};
