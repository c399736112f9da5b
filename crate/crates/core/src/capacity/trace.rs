use serde::Serialize;

use super::capacity_convex_with;
use crate::error::{Error, Result};
use crate::functionals::affine_perimeter_with;
use crate::geometry::{Polytope, Vector};
use crate::sphere::Integrator;

/// Finite sum of point masses.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<Vector>,
    masses: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<Vector>, masses: Vec<f64>) -> Result<Self> {
        if points.len() != masses.len() {
            return Err(Error::Domain(format!("{} points but {} masses", points.len(), masses.len())));
        }
        if let Some(m) = masses.iter().find(|m| !(**m > 0.0) || !m.is_finite()) {
            return Err(Error::Domain(format!("mass {m} is not positive and finite")));
        }
        if let Some(p) = points.iter().find(|p| p.len() != points[0].len()) {
            return Err(Error::DimensionMismatch { expected: points[0].len(), got: p.len() });
        }
        Ok(Self { points, masses })
    }

    /// Equal masses summing to `area` on the midpoints of an `k x k` grid
    /// over `[lo, hi]^2`.
    pub fn grid_2d(lo: f64, hi: f64, k: usize) -> Result<Self> {
        let h = (hi - lo) / k as f64;
        let mut points = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                points.push(crate::geometry::vector(&[lo + (i as f64 + 0.5) * h, lo + (j as f64 + 0.5) * h]));
            }
        }
        Self::new(points, vec![h * h; k * k])
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass of a closed convex set (boundary included).
    pub fn mass_closed(&self, k: &Polytope) -> f64 {
        let slack = 1e-12 * k.radius().max(1.0);
        self.mass_where(|x| k.facets().iter().all(|f| f.normal.dot(x) <= f.offset + slack))
    }

    /// Mass of the interior of a convex set (boundary excluded).
    pub fn mass_open(&self, k: &Polytope) -> f64 {
        let slack = 1e-12 * k.radius().max(1.0);
        self.mass_where(|x| k.facets().iter().all(|f| f.normal.dot(x) < f.offset - slack))
    }

    fn mass_where(&self, inside: impl Fn(&Vector) -> bool) -> f64 {
        self.points.iter().zip(&self.masses).filter(|(p, _)| inside(p)).map(|(_, m)| m).sum()
    }
}

/// Best observed ratios of mass to capacity (compact sets) and to affine
/// perimeter (their interiors) over a test family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceConstants {
    pub q: f64,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub kappa2_hat: f64,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub kappa3_hat: f64,
    /// `q^(1/q) kappa3_hat`, the bound on the trace constant of the
    /// function-space inequality.
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub feasibility_slack: f64,
}

pub fn trace_constants(mu: &DiscreteMeasure, q: f64, family: &[Polytope], integrator: &Integrator) -> Result<TraceConstants> {
    let Some(first) = family.first() else {
        return Err(Error::Config("empty test family".into()));
    };
    let n = first.dim() as f64;
    if !(1.0..=n / (n - 1.0)).contains(&q) {
        return Err(Error::Domain(format!("q = {q} outside [1, {}]", n / (n - 1.0))));
    }
    let (mut kappa2, mut kappa3): (f64, f64) = (0.0, 0.0);
    for k in family {
        let c = capacity_convex_with(k, integrator)?;
        let p = affine_perimeter_with(k, integrator)?;
        kappa2 = kappa2.max(mu.mass_closed(k).powf(1.0 / q) / c);
        kappa3 = kappa3.max(mu.mass_open(k).powf(1.0 / q) / p);
    }
    Ok(TraceConstants { q, kappa2_hat: kappa2, kappa3_hat: kappa3, feasibility_slack: q.powf(1.0 / q) * kappa3 })
}
