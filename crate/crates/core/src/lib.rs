//! Invariant metrizability of canonical Lie group sprays and of geodesic-orbit
//! structures on homogeneous spaces.

pub mod error;
pub mod homogeneous;
pub mod io;
pub mod lie_algebra;
pub mod metrizability;
pub mod sampling;
pub mod spray;
pub mod verify;

pub use error::{Error, Result};
pub use lie_algebra::{catalog, AlgebraElement, LieAlgebra, MatrixRep};
