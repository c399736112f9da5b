//! Seeded random test sets: convex polygons, star-shaped non-convex polygons
//! and convex polytopes in R^3.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::geometry::{convex_hull, Polytope, Vector};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Convex hull of `points` standard Gaussian points in the plane.
pub fn random_convex_polygon(rng: &mut CorpusRng, points: usize) -> Result<Polytope> {
    let pts: Vec<[f64; 2]> = (0..points.max(3)).map(|_| [rng.sample(StandardNormal), rng.sample(StandardNormal)]).collect();
    Polytope::convex_polygon(&pts)
}

/// Star-shaped polygon `r(theta_k) (cos, sin)` with sorted random angles and
/// radii perturbed around 1; redrawn until it is not convex.
pub fn random_star_polygon(rng: &mut CorpusRng, vertices: usize) -> Result<Polytope> {
    let k = vertices.max(5);
    loop {
        let mut angles: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let ring: Vec<[f64; 2]> = angles
            .iter()
            .map(|&a| {
                let r = 1.0 + 0.6 * rng.random_range(-1.0..1.0);
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        let wrap = angles[0] + std::f64::consts::TAU - angles[k - 1];
        let gaps_ok = angles.windows(2).map(|w| w[1] - w[0]).chain([wrap]).all(|g| g > 1e-3 && g < 0.9 * std::f64::consts::PI);
        if !gaps_ok {
            continue;
        }
        let p = Polytope::polygon(&ring)?;
        if !p.is_convex() {
            return Ok(p);
        }
    }
}

/// Convex hull of standard Gaussian points in R^3.
pub fn random_polytope_3d(rng: &mut CorpusRng, points: usize) -> Result<Polytope> {
    let pts: Vec<Vector> = (0..points.max(4)).map(|_| Vector::from_fn(3, |_, _| StandardNormal.sample(rng))).collect();
    convex_hull(&pts)
}

/// Uniform direction on the unit sphere of R^n.
pub fn random_direction(rng: &mut CorpusRng, n: usize) -> Vector {
    loop {
        let v = Vector::from_fn(n, |_, _| StandardNormal.sample(rng));
        let r = v.norm();
        if r > 1e-6 {
            return v / r;
        }
    }
}

/// Sizes of the three families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusSpec {
    pub convex_polygons: usize,
    pub star_polygons: usize,
    pub polytopes: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self { convex_polygons: 200, star_polygons: 50, polytopes: 50 }
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub convex_polygons: Vec<Polytope>,
    pub star_polygons: Vec<Polytope>,
    pub polytopes: Vec<Polytope>,
}

impl Corpus {
    /// Draws the corpus deterministically from `seed`. Polygon point counts
    /// vary between 3 and 40, polytope point counts between 8 and 30.
    pub fn generate(seed: u64, spec: CorpusSpec) -> Result<Self> {
        let mut r = rng(seed);
        let convex_polygons = (0..spec.convex_polygons)
            .map(|_| {
                let k = r.random_range(3..=40);
                random_convex_polygon(&mut r, k)
            })
            .collect::<Result<_>>()?;
        let star_polygons = (0..spec.star_polygons)
            .map(|_| {
                let k = r.random_range(5..=24);
                random_star_polygon(&mut r, k)
            })
            .collect::<Result<_>>()?;
        let polytopes = (0..spec.polytopes)
            .map(|_| {
                let k = r.random_range(8..=30);
                random_polytope_3d(&mut r, k)
            })
            .collect::<Result<_>>()?;
        Ok(Self { convex_polygons, star_polygons, polytopes })
    }

    pub fn all(&self) -> impl Iterator<Item = &Polytope> {
        self.convex_polygons.iter().chain(&self.star_polygons).chain(&self.polytopes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible() {
        let spec = CorpusSpec { convex_polygons: 5, star_polygons: 5, polytopes: 3 };
        let a = Corpus::generate(7, spec).unwrap();
        let b = Corpus::generate(7, spec).unwrap();
        assert_eq!(a.convex_polygons, b.convex_polygons);
        assert_eq!(a.polytopes, b.polytopes);
        assert!(a.star_polygons.iter().all(|p| !p.is_convex()));
        assert!(a.convex_polygons.iter().all(|p| p.is_convex()));
    }
}
