//! Modular linear algebra and integer Gaussian sampling.

pub mod gaussian;
pub mod int;
pub mod matrix;
pub mod modular;
pub mod nullspace;

pub use gaussian::{gauss_sample_int, gauss_sample_matrix, CenteredSampler, GaussianTable, TAIL_CUT};
pub use int::{IntMatrix, IntVector};
pub use matrix::{ModMatrix, ModVector, ZpMatrix, ZpVector, ZqMatrix, ZqVector};
pub use modular::{Modulus, WideModulus, WordModulus};
pub use nullspace::{nullspace_basis, solve_nullspace};
