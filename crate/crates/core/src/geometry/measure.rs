use super::{Polytope, Vector};
use crate::error::{Error, Result};

/// Atoms closer than this angle are merged.
const MERGE_ANGLE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub direction: Vector,
    pub weight: f64,
}

/// Atomic measure on the unit sphere: the surface area measure of a
/// polyhedral set, one atom per distinct outward normal.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceAreaMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

impl SurfaceAreaMeasure {
    /// Normalises directions, drops nothing, merges parallel atoms.
    pub fn new(dim: usize, atoms: Vec<Atom>) -> Result<Self> {
        let mut clean = Vec::with_capacity(atoms.len());
        for a in atoms {
            if a.direction.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: a.direction.len() });
            }
            let norm = a.direction.norm();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::Domain("atom direction must be a non-zero finite vector".into()));
            }
            if !(a.weight > 0.0) || !a.weight.is_finite() {
                return Err(Error::Domain(format!("atom weight must be positive, got {}", a.weight)));
            }
            clean.push(Atom { direction: a.direction / norm, weight: a.weight });
        }
        Ok(Self { dim, atoms: merge(clean) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// `|sum w_i u_i| / sum w_i`; zero for closed boundaries.
    pub fn centroid_residual(&self) -> f64 {
        let mut s = Vector::zeros(self.dim);
        for a in &self.atoms {
            s += &a.direction * a.weight;
        }
        s.norm() / self.total_mass()
    }

    /// Dimension of the span of the atom directions.
    pub fn span_rank(&self) -> usize {
        if self.atoms.is_empty() {
            return 0;
        }
        let m = nalgebra::DMatrix::from_fn(self.atoms.len(), self.dim, |r, c| self.atoms[r].direction[c]);
        let sv = m.singular_values();
        let top = sv.iter().cloned().fold(0.0, f64::max);
        sv.iter().filter(|&&s| s > 1e-10 * top).count()
    }

    /// Same directions, every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            atoms: self.atoms.iter().map(|a| Atom { direction: a.direction.clone(), weight: a.weight * factor }).collect(),
        }
    }
}

fn merge(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| {
        for i in 0..a.direction.len() {
            let o = a.direction[i].total_cmp(&b.direction[i]);
            if o != std::cmp::Ordering::Equal {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    'next: for a in atoms {
        for m in out.iter_mut().rev() {
            if a.direction[0] - m.direction[0] > 10.0 * MERGE_ANGLE {
                break;
            }
            if (&a.direction - &m.direction).norm() < MERGE_ANGLE {
                m.weight += a.weight;
                continue 'next;
            }
        }
        out.push(a);
    }
    out
}

/// One atom per facet, `(normal, facet measure)`, parallel facets merged.
pub fn surface_area_measure(p: &Polytope) -> Result<SurfaceAreaMeasure> {
    if p.facets().is_empty() {
        return Err(Error::InvalidPolytope("empty facet list".into()));
    }
    SurfaceAreaMeasure::new(p.dim(), p.facets().iter().map(|f| Atom { direction: f.normal.clone(), weight: f.measure }).collect())
}

/// Total mass of the surface area measure: the classical perimeter.
pub fn classical_perimeter(s: &SurfaceAreaMeasure) -> f64 {
    s.total_mass()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{convex_hull, vector};

    #[test]
    fn unit_square_atoms() {
        let p = Polytope::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let s = surface_area_measure(&p).unwrap();
        assert_eq!(s.atoms().len(), 4);
        for a in s.atoms() {
            assert!((a.weight - 1.0).abs() < 1e-15);
            assert!(a.direction.iter().filter(|c| c.abs() == 1.0).count() == 1);
        }
        assert_eq!(classical_perimeter(&s), 4.0);
    }

    #[test]
    fn unit_cube_perimeter() {
        let pts: Vec<Vector> = (0..8u32).map(|m| Vector::from_fn(3, |i, _| ((m >> i) & 1) as f64)).collect();
        let s = surface_area_measure(&convex_hull(&pts).unwrap()).unwrap();
        assert_eq!(s.atoms().len(), 6);
        assert!((classical_perimeter(&s) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn dilated_square_weights() {
        let p = Polytope::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap().scaled(3.0).unwrap();
        let s = surface_area_measure(&p).unwrap();
        for a in s.atoms() {
            assert!((a.weight - 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn parallel_atoms_merge() {
        let s = SurfaceAreaMeasure::new(
            2,
            vec![
                Atom { direction: vector(&[1.0, 0.0]), weight: 1.0 },
                Atom { direction: vector(&[1.0, 1e-13]), weight: 2.0 },
                Atom { direction: vector(&[-1.0, 0.0]), weight: 3.0 },
            ],
        )
        .unwrap();
        assert_eq!(s.atoms().len(), 2);
        assert!((s.total_mass() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn regular_polygon_perimeter_converges() {
        let n = 10_000;
        let ring: Vec<[f64; 2]> = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        let s = surface_area_measure(&Polytope::polygon(&ring).unwrap()).unwrap();
        let exact = 2.0 * std::f64::consts::PI;
        assert!((classical_perimeter(&s) - exact).abs() / exact < 1e-6);
        assert!(s.centroid_residual() < 1e-12);
    }
}
