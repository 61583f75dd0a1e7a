//! Elliptic pairs of 2-forms on oriented 4-spaces, splittings of complex
//! structures, the path geometry and CR structure induced on hypersurfaces of
//! `C^2`, and an exact pointwise check of the Cartan test for the exterior
//! differential system whose involutivity gives local embeddability of real
//! analytic path geometries.

pub mod eds;
pub mod error;
pub mod exterior;
pub mod hypersurface;
pub mod json;
pub mod linalg;
pub mod pairs;
pub mod poly;
pub mod scalar;
pub mod splitting;

pub use error::{Error, Result};
pub use exterior::{conformal_pairing, pairing_signature, MultiVector, VolumeForm};
pub use linalg::{LinearMap, Matrix};
pub use scalar::{Field, Rational, Scalar};

/// Default tolerance for floating computations.
pub const DEFAULT_TOL: f64 = 1e-9;
