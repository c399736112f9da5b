use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use crate::error::{Error, Result};
use crate::geometry::{segment_distance, Polytope};

/// Constrained Delaunay triangulation of a simple polygonal domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMesh {
    domain: Polytope,
    points: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    resolution: f64,
}

impl DomainMesh {
    /// Boundary subdivided to edges of length at most `h`, a layer of
    /// vertices `h/2` inside it, and a triangular lattice of spacing `h` at
    /// least `h` away from the boundary.
    pub fn new(domain: &Polytope, h: f64) -> Result<Self> {
        if domain.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: domain.dim() });
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Domain(format!("mesh size must be positive, got {h}")));
        }
        if !(domain.volume() > 0.0) {
            return Err(Error::Degenerate { rank: 1, dim: 2 });
        }
        let ring = domain.ring_2d()?;
        let mut points = Vec::new();
        for k in 0..ring.len() {
            let (a, b) = (ring[k], ring[(k + 1) % ring.len()]);
            let pieces = ((b[0] - a[0]).hypot(b[1] - a[1]) / h).ceil().max(1.0) as usize;
            for i in 0..pieces {
                let t = i as f64 / pieces as f64;
                points.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
        let nb = points.len();
        if (domain.bounds().1 - domain.bounds().0).iter().any(|e| *e / h > 1e4) {
            return Err(Error::Config(format!("mesh size {h} too small for the domain")));
        }

        let edges = domain.edges_2d()?;
        let clearance = |p: [f64; 2]| edges.iter().map(|(a, b)| segment_distance(p, *a, *b)).fold(f64::INFINITY, f64::min);

        // boundary layer: the boundary points pushed inward by h/2
        let m = ring.len();
        let inward = |a: [f64; 2], b: [f64; 2]| {
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = dx.hypot(dy);
            [-dy / len, dx / len]
        };
        let orientation = crate::symmetrize::signed_area(&ring).signum();
        let mut layer: Vec<[f64; 2]> = Vec::new();
        for k in 0..m {
            let (a, b) = (ring[k], ring[(k + 1) % m]);
            let n = inward(a, b).map(|c| c * orientation);
            let pieces = ((b[0] - a[0]).hypot(b[1] - a[1]) / h).ceil().max(1.0) as usize;
            for i in 0..=pieces {
                let t = i as f64 / pieces as f64;
                let p = [a[0] + t * (b[0] - a[0]) + 0.5 * h * n[0], a[1] + t * (b[1] - a[1]) + 0.5 * h * n[1]];
                let c = clearance(p);
                if c >= 0.45 * h
                    && crate::geometry::winding_number(p, &edges) != 0
                    && layer.iter().all(|q| (q[0] - p[0]).hypot(q[1] - p[1]) >= 0.5 * h)
                {
                    layer.push(p);
                }
            }
        }
        points.extend(layer);

        let (lo, hi) = domain.bounds();
        let dy = h * 3f64.sqrt() / 2.0;
        let rows = ((hi[1] - lo[1]) / dy).ceil() as usize;
        for r in 0..=rows {
            let y = lo[1] + r as f64 * dy;
            let shift = if r % 2 == 0 { 0.0 } else { 0.5 * h };
            let mut x = lo[0] + shift;
            while x <= hi[0] {
                let p = [x, y];
                if clearance(p) >= h && crate::geometry::winding_number(p, &edges) != 0 {
                    points.push(p);
                }
                x += h;
            }
        }

        let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
        let mut handles = Vec::with_capacity(points.len());
        for p in &points {
            let handle = cdt.insert(Point2::new(p[0], p[1])).map_err(|e| Error::InvalidPolytope(format!("{e:?}")))?;
            handles.push(handle);
        }
        let mut index = vec![usize::MAX; cdt.num_vertices()];
        for (i, h) in handles.iter().enumerate() {
            if index[h.index()] != usize::MAX {
                return Err(Error::InvalidPolytope("mesh points coincide".into()));
            }
            index[h.index()] = i;
        }
        for k in 0..nb {
            cdt.add_constraint(handles[k], handles[(k + 1) % nb]);
        }

        let mut triangles = Vec::new();
        for face in cdt.inner_faces() {
            let [a, b, c] = face.vertices().map(|v| index[v.fix().index()]);
            let (pa, pb, pc) = (points[a], points[b], points[c]);
            let centroid = [(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0];
            if crate::geometry::winding_number(centroid, &edges) != 0 {
                triangles.push(if orient(pa, pb, pc) > 0.0 { [a, b, c] } else { [a, c, b] });
            }
        }
        let mut boundary = vec![false; points.len()];
        boundary[..nb].iter_mut().for_each(|b| *b = true);
        let mesh = Self { domain: domain.clone(), points, triangles, boundary, resolution: h };

        let (covered, exact) = (mesh.area(), domain.volume());
        if (covered - exact).abs() > 1e-9 * exact {
            return Err(Error::InvalidPolytope(format!("mesh area {covered} differs from domain area {exact}")));
        }
        if mesh.triangles.iter().any(|t| mesh.triangle_area(t) <= 0.0) {
            return Err(Error::InvalidPolytope("degenerate triangle in mesh".into()));
        }
        Ok(mesh)
    }

    pub fn domain(&self) -> &Polytope {
        &self.domain
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    /// Target edge length the mesh was built with.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn triangle_area(&self, t: &[usize; 3]) -> f64 {
        0.5 * orient(self.points[t[0]], self.points[t[1]], self.points[t[2]])
    }

    pub fn area(&self) -> f64 {
        let areas: Vec<f64> = self.triangles.iter().map(|t| self.triangle_area(t)).collect();
        crate::geometry::pairwise_sum(&areas)
    }

    /// Constant gradient of the linear interpolant on triangle `t`.
    pub fn gradient(&self, t: &[usize; 3], values: &[f64]) -> [f64; 2] {
        let [a, b, c] = t.map(|i| self.points[i]);
        let (e1, e2) = ([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
        let (d1, d2) = (values[t[1]] - values[t[0]], values[t[2]] - values[t[0]]);
        let det = e1[0] * e2[1] - e1[1] * e2[0];
        [(d1 * e2[1] - d2 * e1[1]) / det, (d2 * e1[0] - d1 * e2[0]) / det]
    }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Piecewise-linear function on a mesh, zero on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(mesh: &DomainMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.points.len() {
            return Err(Error::DimensionMismatch { expected: mesh.points.len(), got: values.len() });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value {v}")));
        }
        if let Some(i) = (0..values.len()).find(|&i| mesh.boundary[i] && values[i] != 0.0) {
            return Err(Error::Domain(format!("boundary vertex {i} has value {}", values[i])));
        }
        Ok(Self { values })
    }

    /// Samples `f` at interior vertices; boundary vertices get 0.
    pub fn from_fn(mesh: &DomainMesh, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = mesh.points.iter().enumerate().map(|(i, p)| if mesh.boundary[i] { 0.0 } else { f(*p) }).collect();
        Self::new(mesh, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|v| c * v).collect() }
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{regular_polygon, unit_square};

    #[test]
    fn square_mesh_covers_the_square() {
        let m = DomainMesh::new(&unit_square(), 0.1).unwrap();
        assert!((m.area() - 1.0).abs() < 1e-12);
        assert_eq!(m.boundary.iter().filter(|b| **b).count(), 40);
        assert!(m.triangles.len() > 150);
    }

    #[test]
    fn disk_mesh() {
        let disk = regular_polygon(126, 1.0, [0.0, 0.0]).unwrap();
        let m = DomainMesh::new(&disk, 0.05).unwrap();
        assert!((m.area() - disk.volume()).abs() < 1e-9);
    }

    #[test]
    fn non_convex_domain() {
        let l = Polytope::polygon(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        let m = DomainMesh::new(&l, 0.25).unwrap();
        assert!((m.area() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_of_linear_function() {
        let m = DomainMesh::new(&unit_square(), 0.5).unwrap();
        let values: Vec<f64> = m.points.iter().map(|p| 2.0 * p[0] - p[1]).collect();
        for t in m.triangles() {
            let g = m.gradient(t, &values);
            assert!((g[0] - 2.0).abs() < 1e-12 && (g[1] + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_values_must_vanish() {
        let m = DomainMesh::new(&unit_square(), 0.5).unwrap();
        assert!(GridFunction::new(&m, vec![1.0; m.points.len()]).is_err());
        assert!(GridFunction::from_fn(&m, |_| 1.0).is_ok());
    }
}
