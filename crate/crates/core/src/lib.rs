//! Point-to-plane distance matrices: construction, ambiguity classes,
//! uniqueness classification and reconstruction.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`). The
//! aliases below fix the scalar to `f64`, with `f32` variants suffixed.

pub mod classes;
pub mod error;
pub mod figures;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod reconstruct;
pub mod sampling;
pub mod scalar;
pub mod uniqueness;
pub mod verify;

pub use classes::{ClassId, ClassSpec, GeneratedPair};
pub use error::{Error, Result};
pub use scalar::Real;
pub use uniqueness::{classify, ClassificationReport, Verdict};
pub use verify::{verify_pair, PairVerdict, VerificationReport};
pub use reconstruct::reconstruct_configuration;
pub use geometry::compute_ppdm;

pub type Plane = geometry::Plane<f64>;
pub type Configuration = geometry::Configuration<f64>;
pub type Ppdm = geometry::Ppdm<f64>;
pub type RigidMotion = geometry::RigidMotion<f64>;

pub type PlaneF32 = geometry::Plane<f32>;
pub type ConfigurationF32 = geometry::Configuration<f32>;
pub type PpdmF32 = geometry::Ppdm<f32>;
pub type RigidMotionF32 = geometry::RigidMotion<f32>;
