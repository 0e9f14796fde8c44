//! Flat geometry of d-symmetric torus covers.
//!
//! A d-symmetric surface is d copies of the unit torus slit along the segment
//! from 0 to a twist w and glued cyclically. The crate computes their cylinder
//! decompositions, the SL2(Z) orbits of twists, Siegel–Veech constants in exact
//! form, and brute-force counts N(T) to check the constants against.

pub mod arith;
pub mod counting;
pub mod error;
pub mod fiber;
pub mod sl2z;
pub mod surface;
pub mod svconstants;

pub use arith::Rational;
pub use counting::{growth_report, CountKind, GrowthReport, GrowthRow};
pub use error::{Error, Result};
pub use fiber::{build_fiber_decomposition, FiberDecomposition};
pub use sl2z::{IntegerMatrix2, OrbitSet, TorusPoint};
pub use surface::{build, CylinderDecomposition, CylinderGroup, DSurface, TwistPoint};
pub use svconstants::{Constant, Transcendental};
