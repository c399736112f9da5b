//! Polytopes, convex hulls, linear images and surface area measures.

mod constants;
mod hull;
mod linear;
mod measure;
mod polytope;
pub mod shapes;

pub use constants::{omega, sphere_measure, Constants};
pub use hull::{affine_rank, convex_hull};
pub use linear::LinearMap;
pub use measure::{classical_perimeter, surface_area_measure, Atom, SurfaceAreaMeasure};
pub use polytope::{Facet, Polytope};
pub(crate) use polytope::{segment_distance, segments_cross, winding_number};

use nalgebra::DVector;

/// Point or direction in R^n.
pub type Vector = DVector<f64>;

/// Builds a vector from a slice.
pub fn vector(coords: &[f64]) -> Vector {
    DVector::from_column_slice(coords)
}

/// Unit vector along axis `i` in R^n.
pub fn axis(n: usize, i: usize) -> Vector {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `normal`.
///
/// In R^3 the returned pair `(e1, e2)` satisfies `e1 x e2 = normal`, so a
/// counter-clockwise loop in `(e1, e2)` coordinates is counter-clockwise when
/// seen from the side the normal points to.
pub fn orthogonal_basis(normal: &Vector) -> Vec<Vector> {
    let n = normal.len();
    if n == 2 {
        return vec![vector(&[-normal[1], normal[0]])];
    }
    if n == 3 {
        let seed = if normal[0].abs() < 0.6 { axis(3, 0) } else if normal[1].abs() < 0.6 { axis(3, 1) } else { axis(3, 2) };
        let e1 = (&seed - normal * normal.dot(&seed)).normalize();
        let e2 = cross3(normal, &e1);
        return vec![e1, e2];
    }
    let mut basis: Vec<Vector> = Vec::with_capacity(n - 1);
    let mut candidates: Vec<(f64, usize)> = (0..n).map(|i| (normal[i].abs(), i)).collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(_, i) in &candidates {
        if basis.len() == n - 1 {
            break;
        }
        let mut v = axis(n, i) - normal * normal[i];
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
    }
    basis
}

pub(crate) fn cross3(a: &Vector, b: &Vector) -> Vector {
    vector(&[a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])
}

/// Pairwise (cascade) summation; fixed order, so results do not depend on how
/// the terms were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_basis_is_orthonormal() {
        for n in 2..=6 {
            let mut v = Vector::from_fn(n, |i, _| (i as f64 + 0.3).sin());
            v.normalize_mut();
            let b = orthogonal_basis(&v);
            assert_eq!(b.len(), n - 1);
            for (i, bi) in b.iter().enumerate() {
                assert!((bi.norm() - 1.0).abs() < 1e-12);
                assert!(bi.dot(&v).abs() < 1e-12);
                for bj in &b[..i] {
                    assert!(bi.dot(bj).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn basis_orientation_in_3d() {
        let n = vector(&[0.2, -0.5, 0.7]).normalize();
        let b = orthogonal_basis(&n);
        let c = cross3(&b[0], &b[1]);
        assert!((c - n).norm() < 1e-12);
    }

    #[test]
    fn pairwise_sum_matches() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499500.0);
    }
}
