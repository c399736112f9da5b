//! Standard test bodies: boxes, regular polygons, ellipses, icospheres.

use super::{cross3, vector, Polytope, Vector};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Axis-parallel rectangle `[x0, x1] x [y0, y1]`.
pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Polytope> {
    Polytope::polygon(&[[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
}

/// `[0, 1]^2`.
pub fn unit_square() -> Polytope {
    rectangle(0.0, 0.0, 1.0, 1.0).expect("unit square")
}

/// `{|x| + |y| <= r}`.
pub fn diamond(r: f64) -> Result<Polytope> {
    Polytope::polygon(&[[r, 0.0], [0.0, r], [-r, 0.0], [0.0, -r]])
}

/// Regular `sides`-gon inscribed in the circle of radius `radius`.
pub fn regular_polygon(sides: usize, radius: f64, center: [f64; 2]) -> Result<Polytope> {
    ellipse(radius, radius, sides, center)
}

/// Polygon with `sides` vertices on the ellipse with semi-axes `a`, `b`.
pub fn ellipse(a: f64, b: f64, sides: usize, center: [f64; 2]) -> Result<Polytope> {
    if sides < 3 {
        return Err(Error::Domain(format!("a polygon needs at least 3 sides, got {sides}")));
    }
    let ring: Vec<[f64; 2]> = (0..sides)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / sides as f64;
            [center[0] + a * t.cos(), center[1] + b * t.sin()]
        })
        .collect();
    Polytope::polygon(&ring)
}

/// Axis-parallel box in R^n.
pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Polytope> {
    let n = lo.len();
    if hi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: hi.len() });
    }
    if n == 2 {
        return rectangle(lo[0], lo[1], hi[0], hi[1]);
    }
    let pts: Vec<Vector> =
        (0..(1u32 << n)).map(|m| Vector::from_fn(n, |i, _| if (m >> i) & 1 == 1 { hi[i] } else { lo[i] })).collect();
    super::convex_hull(&pts)
}

/// `[0, 1]^n`.
pub fn unit_cube(n: usize) -> Polytope {
    cuboid(&vec![0.0; n], &vec![1.0; n]).expect("unit cube")
}

/// Geodesic polyhedron with `20 * 4^level` triangles inscribed in the sphere
/// of radius `radius` about the origin.
pub fn icosphere(level: u32, radius: f64) -> Result<Polytope> {
    let (vertices, triangles) = icosphere_mesh(level);
    let vertices: Vec<Vector> = vertices.into_iter().map(|v| v * radius).collect();
    let p = Polytope::from_triangles(vertices, &triangles)?;
    if !p.is_convex() {
        return Err(Error::InvalidPolytope("icosphere lost convexity".into()));
    }
    Ok(p)
}

/// Unit-sphere geodesic mesh, triangles oriented outward.
pub fn icosphere_mesh(level: u32) -> (Vec<Vector>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut vertices: Vec<Vector> = raw.iter().map(|p| vector(p).normalize()).collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vector>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                vertices.push(((&vertices[a] + &vertices[b]) * 0.5).normalize());
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let ab = midpoint(f[0], f[1], &mut vertices);
            let bc = midpoint(f[1], f[2], &mut vertices);
            let ca = midpoint(f[2], f[0], &mut vertices);
            next.push([f[0], ab, ca]);
            next.push([f[1], bc, ab]);
            next.push([f[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    for f in faces.iter_mut() {
        let n = cross3(&(&vertices[f[1]] - &vertices[f[0]]), &(&vertices[f[2]] - &vertices[f[0]]));
        if n.dot(&vertices[f[0]]) < 0.0 {
            f.swap(1, 2);
        }
    }
    (vertices, faces)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts() {
        let p = icosphere(2, 1.0).unwrap();
        assert_eq!(p.facets().len(), 320);
        assert!(p.is_convex());
        assert!(p.closing_residual() < 1e-12);
        let v = p.volume();
        assert!(v < 4.0 * PI / 3.0 && v > 0.95 * 4.0 * PI / 3.0);
    }

    #[test]
    fn regular_polygon_area() {
        let n = 64;
        let p = regular_polygon(n, 2.0, [1.0, -1.0]).unwrap();
        let exact = 0.5 * n as f64 * 4.0 * (2.0 * PI / n as f64).sin();
        assert!((p.volume() - exact).abs() < 1e-12);
        assert!(p.is_convex());
    }

    #[test]
    fn cuboid_in_four_dimensions() {
        let p = cuboid(&[0.0; 4], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((p.volume() - 24.0).abs() < 1e-10);
    }
}
