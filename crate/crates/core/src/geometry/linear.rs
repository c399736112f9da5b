use super::{Facet, Polytope, Vector};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Affine map `x -> A x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: DMatrix<f64>,
    translation: Vector,
    determinant: f64,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>, translation: Vector) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.ncols() });
        }
        if translation.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: translation.len() });
        }
        let determinant = matrix.determinant();
        Ok(Self { matrix, translation, determinant })
    }

    pub fn linear(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, Vector::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: DMatrix::identity(n, n), translation: Vector::zeros(n), determinant: 1.0 }
    }

    pub fn translation(t: Vector) -> Self {
        let n = t.len();
        Self { matrix: DMatrix::identity(n, n), translation: t, determinant: 1.0 }
    }

    /// Row-major 2x2 matrix.
    pub fn from_rows_2d(rows: [[f64; 2]; 2]) -> Result<Self> {
        Self::linear(DMatrix::from_row_slice(2, 2, &[rows[0][0], rows[0][1], rows[1][0], rows[1][1]]))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn offset(&self) -> &Vector {
        &self.translation
    }

    pub fn determinant(&self) -> f64 {
        self.determinant
    }

    /// Whether the linear part lies in SL(n).
    pub fn is_special(&self) -> bool {
        (self.determinant - 1.0).abs() < 1e-10
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.matrix * x + &self.translation
    }

    /// `self` after `first`: `x -> self(first(x))`.
    pub fn compose(&self, first: &LinearMap) -> Result<LinearMap> {
        LinearMap::new(&self.matrix * &first.matrix, &self.matrix * &first.translation + &self.translation)
    }

    /// Image of a polytope. Vertices are mapped; normals are transported by
    /// the inverse transpose and facet measures rescaled accordingly.
    pub fn apply_map(&self, p: &Polytope) -> Result<Polytope> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.dim() });
        }
        let scale = self.matrix.iter().map(|a| a.abs()).fold(0.0, f64::max);
        if self.determinant == 0.0 || self.determinant.abs() <= 1e-14 * scale.powi(self.dim() as i32) {
            return Err(Error::SingularMap(self.determinant));
        }
        let inv_t = self.matrix.clone().try_inverse().ok_or(Error::SingularMap(self.determinant))?.transpose();
        let vertices: Vec<Vector> = p.vertices().iter().map(|v| self.apply(v)).collect();
        let facets = p
            .facets()
            .iter()
            .map(|f| {
                let m = &inv_t * &f.normal;
                let len = m.norm();
                let normal = m / len;
                let offset = (f.offset + (&inv_t * &f.normal).dot(&self.translation)) / len;
                Facet { normal, measure: f.measure * self.determinant.abs() * len, offset, vertices: f.vertices.clone() }
            })
            .collect();
        Polytope::assemble(p.dim(), vertices, facets, Some(p.is_convex()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{convex_hull, vector};

    fn unit_square() -> Polytope {
        Polytope::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn identity_is_noop() {
        let p = unit_square();
        let q = LinearMap::identity(2).apply_map(&p).unwrap();
        assert_eq!(p.vertices(), q.vertices());
        for (a, b) in p.facets().iter().zip(q.facets()) {
            assert!((&a.normal - &b.normal).norm() < 1e-15);
            assert!((a.measure - b.measure).abs() < 1e-15);
        }
    }

    #[test]
    fn area_preserving_stretch() {
        let t = LinearMap::from_rows_2d([[2.0, 0.0], [0.0, 0.5]]).unwrap();
        assert!(t.is_special());
        let q = t.apply_map(&unit_square()).unwrap();
        assert!((q.volume() - 1.0).abs() < 1e-14);
        let mut measures: Vec<f64> = q.facets().iter().map(|f| f.measure).collect();
        measures.sort_by(f64::total_cmp);
        assert!((measures[0] - 0.5).abs() < 1e-14 && (measures[3] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn translation_keeps_surface_measure() {
        let mut pts = Vec::new();
        for m in 0..8u32 {
            pts.push(Vector::from_fn(3, |i, _| ((m >> i) & 1) as f64));
        }
        let cube = convex_hull(&pts).unwrap();
        let moved = LinearMap::translation(vector(&[5.0, 5.0, 5.0])).apply_map(&cube).unwrap();
        for (a, b) in cube.facets().iter().zip(moved.facets()) {
            assert!((&a.normal - &b.normal).norm() < 1e-14);
            assert!((a.measure - b.measure).abs() < 1e-14);
        }
        assert!((moved.volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_rejected() {
        let t = LinearMap::from_rows_2d([[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(t.apply_map(&unit_square()), Err(Error::SingularMap(_))));
    }

    #[test]
    fn offsets_match_mapped_vertices() {
        let t = LinearMap::new(DMatrix::from_row_slice(2, 2, &[1.0, 3.0, -0.5, 2.0]), vector(&[0.3, -7.0])).unwrap();
        let q = t.apply_map(&unit_square()).unwrap();
        for f in q.facets() {
            for &i in &f.vertices {
                assert!((f.normal.dot(&q.vertices()[i]) - f.offset).abs() < 1e-12);
            }
        }
        assert!((q.volume() - t.determinant().abs()).abs() < 1e-12);
    }
}
