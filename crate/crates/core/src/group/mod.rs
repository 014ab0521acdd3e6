//! Homogeneous groups: dilations, laws, left-invariant frames, exponential
//! coordinates and quasi-norms.

mod custom;
mod frame_change;
mod point;
pub mod poly;
mod quasinorm;
mod spec;
mod validate;
mod weights;

pub use custom::GroupFile;
pub use frame_change::PolynomialMatrix;
pub use point::{Point, Vector, MAX_DIM};
pub use quasinorm::{QuasiNorm, QuasiNormKind};
pub use spec::{GroupKind, GroupSpec};
pub use validate::InvariantResidual;
pub use weights::DilationWeights;
