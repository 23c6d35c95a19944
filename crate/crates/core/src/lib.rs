//! Numerical laboratory for representations of the Heisenberg–Weyl Lie
//! algebra: Schrödinger representations and their tensor-product
//! intertwiners, lowest-weight states, and indecomposability of symplectic
//! irreducibles restricted to an embedded Heisenberg–Weyl subalgebra.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod indecomp;
pub mod intertwine;
pub mod irreps;
pub mod exec;
pub mod numkernel;
pub mod oscillator;
pub mod report;
pub mod rootsys;
pub mod suite;
pub mod sympembed;

pub use error::{Error, Result};
pub use exec::Exec;
