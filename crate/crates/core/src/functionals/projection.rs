use super::omega_n;
use crate::error::{Error, Result};
use crate::geometry::{Polytope, SurfaceAreaMeasure, Vector};
use crate::sphere::{cosine_profile_from_atoms, exact_2d_negative_square_integral, integrate_negative_power, Integrator};

/// Zonotope `sum_i [-c_i u_i, c_i u_i]` with support `h(v) = sum_i c_i |v . u_i|`.
///
/// Built from a surface area measure with `c_i = w_i / 2`, it is the
/// projection body: `h(v)` is the shadow of the set on `v`'s orthogonal
/// hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionBody {
    measure: SurfaceAreaMeasure,
}

/// Projection body of a surface area measure.
pub fn projection_body(s: &SurfaceAreaMeasure) -> Result<ProjectionBody> {
    if s.atoms().is_empty() {
        return Err(Error::Domain("empty surface area measure".into()));
    }
    Ok(ProjectionBody { measure: s.clone() })
}

impl ProjectionBody {
    pub fn dim(&self) -> usize {
        self.measure.dim()
    }

    /// `(direction, half-weight)` pairs.
    pub fn generators(&self) -> impl Iterator<Item = (&Vector, f64)> {
        self.measure.atoms().iter().map(|a| (&a.direction, 0.5 * a.weight))
    }

    pub fn measure(&self) -> &SurfaceAreaMeasure {
        &self.measure
    }

    pub fn support(&self, v: &Vector) -> f64 {
        0.5 * self.measure.atoms().iter().map(|a| a.weight * v.dot(&a.direction).abs()).sum::<f64>()
    }

    /// Whether the generators span R^n (the support is a norm).
    pub fn spans(&self) -> bool {
        self.measure.span_rank() == self.dim()
    }

    /// `V(polar) = (1/n) int_{S^(n-1)} h^-n`, exact in the plane; `+inf` for
    /// lower-dimensional zonotopes.
    pub fn polar_volume(&self, integrator: &Integrator) -> Result<f64> {
        if !self.spans() {
            return Ok(f64::INFINITY);
        }
        let n = self.dim();
        let integral = if n == 2 {
            let profile = cosine_profile_from_atoms(&self.measure)?;
            exact_2d_negative_square_integral(&profile)
        } else {
            integrate_negative_power(|u| self.support(u), n, integrator.rule(n)?)
        };
        match integral {
            Ok(v) => Ok(v / n as f64),
            Err(Error::Divergent { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    }

    /// Petty-normalised polar volume `V(polar) / w_n`.
    pub fn normalised_polar_volume(&self, integrator: &Integrator) -> Result<f64> {
        Ok(self.polar_volume(integrator)? / omega_n(self.dim()))
    }
}

/// Polar of a planar projection body as an explicit polygon.
///
/// The zonotope's edges are parallel to its generators, so its facet normals
/// are the generators turned by a right angle; the polar's vertices are those
/// normals divided by the support value.
pub fn polar_polygon(z: &ProjectionBody) -> Result<Polytope> {
    if z.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: z.dim() });
    }
    if !z.spans() {
        return Err(Error::Divergent { min: 0.0, max: 0.0 });
    }
    let mut pts = Vec::with_capacity(2 * z.measure.atoms().len());
    for a in z.measure.atoms() {
        let nu = Vector::from_column_slice(&[-a.direction[1], a.direction[0]]);
        let h = z.support(&nu);
        pts.push([nu[0] / h, nu[1] / h]);
        pts.push([-nu[0] / h, -nu[1] / h]);
    }
    Polytope::convex_polygon(&pts)
}
