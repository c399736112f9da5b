//! Affine perimeter, affine BV-capacity, Steiner symmetrization and affine
//! Cheeger constants of polyhedral sets.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: polytopes, convex hulls, linear maps, surface area measures.
//! - [`sphere`]: integration over the unit sphere, exact in the plane and by
//!   product quadrature in higher dimensions.
//! - [`functionals`]: projection bodies, polar volumes, affine and classical
//!   perimeters and the inequality report built from them.
//! - [`symmetrize`]: Steiner symmetrization through chord partitions.
//! - [`capacity`]: affine BV-capacity, exact for convex bodies and bracketed
//!   for general compact polyhedral sets.
//! - [`cheeger`]: affine q-Cheeger constants and the affine Rayleigh quotient
//!   on piecewise-linear functions.
//!
//! Every value type is immutable after construction and every operation is a
//! pure function, so batch work can be spread over threads freely.

pub mod capacity;
pub mod cheeger;
pub mod corpus;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod io;
pub mod sphere;
pub mod symmetrize;
pub mod tolerance;

pub use error::{Error, Result};
pub use geometry::{omega, LinearMap, Polytope, SurfaceAreaMeasure, Vector};
pub use tolerance::Tolerances;
