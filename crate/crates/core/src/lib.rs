//! Calculus on homogeneous Lie groups with quadrature-based verification of
//! uncertainty identities, Hardy-type inequalities and their sharp constants.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! verification suite runs on.

pub mod error;
pub mod field;
pub mod group;
pub mod operators;
pub mod quadrature;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Cx, Scalar};

pub type Point = group::Point<f64>;
pub type GroupSpec = group::GroupSpec<f64>;
pub type QuasiNorm = group::QuasiNorm<f64>;
pub type DilationWeights = group::DilationWeights<f64>;
pub type Complex = Cx<f64>;
