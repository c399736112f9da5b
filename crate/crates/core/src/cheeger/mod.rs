//! Affine q-Cheeger constants of planar domains and the affine Rayleigh
//! quotient of piecewise-linear functions.
//!
//! Both searches return upper bounds: the best set and the best function
//! found, never a certified optimum.

mod mesh;
mod rayleigh;
mod set;

pub use mesh::{DomainMesh, GridFunction};
pub use rayleigh::{affine_rayleigh, minimize_rayleigh, RayleighResult, CIRCLE_NODES};
pub use set::{affine_cheeger, boundary_contact, cheeger_quotient, CheegerConfig, CheegerResult};

use crate::error::Result;
use crate::geometry::shapes::regular_polygon;
use crate::geometry::Polytope;

/// Centred disk as a regular polygon with edges about `h` long.
pub fn disk_domain(radius: f64, h: f64) -> Result<Polytope> {
    let sides = ((std::f64::consts::TAU * radius / h).ceil() as usize).max(8);
    regular_polygon(sides, radius, [0.0, 0.0])
}
