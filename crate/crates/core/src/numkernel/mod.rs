//! Deterministic dense complex linear algebra and quadrature substrate.

pub mod linalg;
pub mod matrix;
pub mod quadrature;

pub use linalg::{eigenvalues, nullspace, nullspace_detailed, Nullspace};
pub use matrix::{ComplexMatrix, I, ONE, ZERO};
pub use quadrature::{gauss_hermite, QuadratureRule};
