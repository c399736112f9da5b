//! Projection bodies, polar volumes, affine and classical perimeters.

mod projection;
mod report;

pub use projection::{polar_polygon, projection_body, ProjectionBody};
pub use report::{inequality_report, inequality_report_with, PerimeterReport};
pub(crate) use report::sig12;

use crate::error::{Error, Result};
use crate::geometry::omega;
use crate::geometry::shapes::{icosphere, regular_polygon};
use crate::geometry::{surface_area_measure, Polytope, SurfaceAreaMeasure};
use crate::sphere::{default_integrator, Integrator};

pub(crate) fn omega_n(n: usize) -> f64 {
    crate::geometry::omega(n as i64).expect("n >= 1")
}

/// Affine perimeter from a surface area measure:
/// `(2^n w_n)^(1/n) V(polar of Pi E)^(-1/n)`, zero when the polar body is
/// unbounded (normals not spanning R^n).
pub fn affine_perimeter_of_measure(s: &SurfaceAreaMeasure, integrator: &Integrator) -> Result<f64> {
    let z = projection_body(s)?;
    let polar = z.polar_volume(integrator)?;
    Ok(perimeter_from_polar_volume(s.dim(), polar))
}

pub(crate) fn perimeter_from_polar_volume(n: usize, polar: f64) -> f64 {
    if polar.is_infinite() {
        return 0.0;
    }
    (2f64.powi(n as i32) * omega_n(n) / polar).powf(1.0 / n as f64)
}

/// Affine perimeter of a polyhedral set (default quadrature above the plane).
pub fn affine_perimeter(e: &Polytope) -> Result<f64> {
    affine_perimeter_with(e, default_integrator())
}

pub fn affine_perimeter_with(e: &Polytope, integrator: &Integrator) -> Result<f64> {
    affine_perimeter_of_measure(&surface_area_measure(e)?, integrator)
}

/// Affine surface area `2 (V(polar of Pi K) / w_n)^(-1/n)` of a convex body.
/// Numerically identical to [`affine_perimeter`]; kept separate because it
/// is only defined for convex bodies.
pub fn affine_surface_area(k: &Polytope) -> Result<f64> {
    affine_surface_area_with(k, default_integrator())
}

pub fn affine_surface_area_with(k: &Polytope, integrator: &Integrator) -> Result<f64> {
    if !k.is_convex() {
        return Err(Error::NotConvex);
    }
    let z = projection_body(&surface_area_measure(k)?)?;
    let polar = z.polar_volume(integrator)?;
    if polar.is_infinite() {
        return Ok(0.0);
    }
    let n = k.dim();
    Ok(2.0 * (polar / omega_n(n)).powf(-1.0 / n as f64))
}

/// Radius of the centred ball with the volume of `e`.
pub fn rounding_radius(e: &Polytope) -> Result<f64> {
    let v = e.volume();
    if !(v > 0.0) {
        return Err(Error::Degenerate { rank: e.dim() - 1, dim: e.dim() });
    }
    let n = e.dim();
    Ok((v / omega(n as i64)?).powf(1.0 / n as f64))
}

/// Fineness of the polytopal balls used for roundings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallFineness {
    /// Planar balls are regular `2^k`-gons.
    pub polygon_log2: u32,
    /// Balls in R^3 are icospheres with `20 * 4^level` faces.
    pub icosphere_level: u32,
}

impl Default for BallFineness {
    fn default() -> Self {
        Self { polygon_log2: 10, icosphere_level: 3 }
    }
}

/// Polytopal approximation of a centred ball, vertices on the sphere.
pub fn ball(n: usize, radius: f64, fineness: BallFineness) -> Result<Polytope> {
    match n {
        2 => regular_polygon(1usize << fineness.polygon_log2, radius, [0.0, 0.0]),
        3 => icosphere(fineness.icosphere_level, radius),
        _ => Err(Error::Unsupported(format!("ball approximations in dimension {n}"))),
    }
}

/// Rounding `R(E)`: the centred ball with the volume of `E`, as an inscribed
/// regular polytope.
pub fn rounding(e: &Polytope, fineness: BallFineness) -> Result<Polytope> {
    ball(e.dim(), rounding_radius(e)?, fineness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{diamond, ellipse, rectangle, unit_cube, unit_square};
    use crate::geometry::{vector, LinearMap};
    use std::f64::consts::PI;

    #[test]
    fn unit_square_affine_perimeter() {
        let p = affine_perimeter(&unit_square()).unwrap();
        assert!((p - (2.0 * PI).sqrt()).abs() < 1e-14);
        assert!((affine_surface_area(&unit_square()).unwrap() - p).abs() < 1e-14);
    }

    #[test]
    fn unit_disk_affine_perimeter() {
        let d = regular_polygon(10_000, 1.0, [0.0, 0.0]).unwrap();
        let p = affine_perimeter(&d).unwrap();
        assert!((p - 4.0).abs() < 4e-6, "{p}");
    }

    #[test]
    fn unit_cube_affine_perimeter() {
        let p = affine_perimeter(&unit_cube(3)).unwrap();
        let exact = (8.0 * PI).powf(1.0 / 3.0);
        assert!((p - exact).abs() < 2e-3 * exact, "{p} vs {exact}");
    }

    #[test]
    fn shear_invariance() {
        let t = LinearMap::from_rows_2d([[1.0, 5.0], [0.0, 1.0]]).unwrap();
        let sheared = t.apply_map(&unit_square()).unwrap();
        let p = affine_surface_area(&sheared).unwrap();
        assert!((p - (2.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn non_convex_rejected_by_affine_surface_area() {
        let l = crate::geometry::Polytope::polygon(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        assert_eq!(affine_surface_area(&l), Err(Error::NotConvex));
        assert!(affine_perimeter(&l).unwrap() > 0.0);
    }

    #[test]
    fn degenerate_set_has_zero_affine_perimeter() {
        let s = crate::geometry::Polytope::segment([-1.0, 0.0], [1.0, 0.0]).unwrap();
        assert_eq!(affine_perimeter(&s).unwrap(), 0.0);
    }

    #[test]
    fn roundings() {
        assert!((rounding_radius(&unit_square()).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-14);
        let cube8 = crate::geometry::shapes::cuboid(&[0.0; 3], &[2.0; 3]).unwrap();
        assert!((rounding_radius(&cube8).unwrap() - (6.0 / PI).powf(1.0 / 3.0)).abs() < 1e-12);
        let r = rounding(&unit_square(), BallFineness::default()).unwrap();
        assert!((r.radius() - 1.0 / PI.sqrt()).abs() < 1e-12);
        let d = regular_polygon(4096, 0.7, [0.0, 0.0]).unwrap();
        assert!((rounding_radius(&d).unwrap() - 0.7).abs() < 1e-6);
        assert!(rounding_radius(&crate::geometry::Polytope::segment([0.0, 0.0], [1.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn scaling_law_planar() {
        let e = ellipse(1.3, 0.4, 37, [0.2, 0.1]).unwrap();
        let p = affine_perimeter(&e).unwrap();
        for r in [0.5, 2.0, 10.0] {
            let q = affine_perimeter(&e.scaled(r).unwrap()).unwrap();
            assert!((q - r * p).abs() <= 1e-9 * q);
        }
    }

    #[test]
    fn rectangles_of_equal_area_agree() {
        let a = affine_perimeter(&rectangle(0.0, 0.0, 3.0, 1.0 / 3.0).unwrap()).unwrap();
        assert!((a - (2.0 * PI).sqrt()).abs() < 1e-13);
        let big = affine_perimeter(&rectangle(-500.0, -5.0, 500.0, 5.0).unwrap()).unwrap();
        assert!((big - 100.0 * (2.0 * PI).sqrt()).abs() < 1e-9 * big);
        let g = affine_perimeter(&diamond(500.0).unwrap()).unwrap();
        assert!((g - 1000.0 * PI.sqrt()).abs() < 1e-9 * g);
        let _ = vector(&[0.0, 0.0]);
    }
}
