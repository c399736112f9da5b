use super::hull::{monotone_chain, polygon_area};
use super::{cross3, vector, Vector};
use crate::error::{Error, Result};

/// One boundary piece of a polyhedral set: a flat (n-1)-dimensional face.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    /// Outward unit normal.
    pub normal: Vector,
    /// (n-1)-dimensional Hausdorff measure of the facet.
    pub measure: f64,
    /// `normal . x` for every point `x` of the facet.
    pub offset: f64,
    /// Indices of the facet's vertices: the two endpoints of an edge in the
    /// plane, a loop in R^3, an unordered vertex set above. May be empty for
    /// sets given by normals and measures only.
    pub vertices: Vec<usize>,
}

/// Compact polyhedral set: vertices plus an outward-oriented facet list.
///
/// Convex bodies come out of [`super::convex_hull`]; non-convex sets of finite
/// perimeter are built from explicit boundaries ([`Polytope::polygon`],
/// [`Polytope::from_triangles`], [`Polytope::from_facets`]). The facet list
/// must close up: the measure-weighted normals sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vector>,
    facets: Vec<Facet>,
    convex: bool,
    volume: f64,
}

const NORMAL_TOL: f64 = 1e-12;
const CLOSING_TOL: f64 = 1e-9;

impl Polytope {
    /// Validates and freezes a facet description. `convex` is detected when
    /// not supplied.
    pub(crate) fn assemble(dim: usize, vertices: Vec<Vector>, facets: Vec<Facet>, convex: Option<bool>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("dimension must be at least 2, got {dim}")));
        }
        if facets.is_empty() {
            return Err(Error::InvalidPolytope("empty facet list".into()));
        }
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidPolytope("non-finite vertex coordinate".into()));
            }
        }
        for (k, f) in facets.iter().enumerate() {
            if f.normal.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: f.normal.len() });
            }
            if (f.normal.norm() - 1.0).abs() > NORMAL_TOL {
                return Err(Error::InvalidPolytope(format!("facet {k}: normal is not a unit vector")));
            }
            if !(f.measure > 0.0) || !f.measure.is_finite() {
                return Err(Error::InvalidPolytope(format!("facet {k}: measure {} is not positive", f.measure)));
            }
            if let Some(&i) = f.vertices.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::InvalidPolytope(format!("facet {k}: vertex index {i} out of range")));
            }
        }
        let total: f64 = facets.iter().map(|f| f.measure).sum();
        let mut closing = Vector::zeros(dim);
        for f in &facets {
            closing += &f.normal * f.measure;
        }
        if closing.norm() > CLOSING_TOL * total {
            return Err(Error::InvalidPolytope(format!(
                "facet list does not close up: |sum w_i nu_i| = {:e} for total measure {:e}",
                closing.norm(),
                total
            )));
        }
        let center = centroid_of(dim, &vertices);
        let volume = (facets.iter().map(|f| f.measure * (f.offset - f.normal.dot(&center))).sum::<f64>() / dim as f64).max(0.0);
        let convex = match convex {
            Some(c) => c,
            None => detect_convex(&vertices, &facets),
        };
        Ok(Self { dim, vertices, facets, convex, volume })
    }

    /// Builds a set from explicit facets; normals are normalised and offsets
    /// recomputed from facet vertices when those are given.
    pub fn from_facets(dim: usize, vertices: Vec<Vector>, facets: Vec<Facet>) -> Result<Self> {
        let mut fixed = Vec::with_capacity(facets.len());
        for (k, mut f) in facets.into_iter().enumerate() {
            let norm = f.normal.norm();
            if !(norm > 0.0) || (norm - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidPolytope(format!("facet {k}: normal has length {norm}")));
            }
            f.normal /= norm;
            fixed.push(f);
        }
        Self::assemble(dim, vertices, fixed, None)
    }

    /// Simple polygon from a vertex ring (either orientation).
    pub fn polygon(ring: &[[f64; 2]]) -> Result<Self> {
        let mut pts: Vec<[f64; 2]> = Vec::with_capacity(ring.len());
        for p in ring {
            if pts.last() != Some(p) {
                pts.push(*p);
            }
        }
        while pts.len() > 1 && pts.first() == pts.last() {
            pts.pop();
        }
        if pts.len() < 3 {
            return Err(Error::Degenerate { rank: pts.len().saturating_sub(1), dim: 2 });
        }
        let idx: Vec<usize> = (0..pts.len()).collect();
        if polygon_area(&pts, &idx) < 0.0 {
            pts.reverse();
        }
        let vertices: Vec<Vector> = pts.iter().map(|p| vector(p)).collect();
        let mut facets = Vec::with_capacity(pts.len());
        for k in 0..pts.len() {
            let l = (k + 1) % pts.len();
            let (dx, dy) = (pts[l][0] - pts[k][0], pts[l][1] - pts[k][1]);
            let len = dx.hypot(dy);
            let normal = vector(&[dy / len, -dx / len]);
            let offset = normal[0] * pts[k][0] + normal[1] * pts[k][1];
            facets.push(Facet { normal, measure: len, offset, vertices: vec![k, l] });
        }
        // a simple ring turning left at every vertex bounds a convex set
        let spread = vertices.iter().map(|v| (v - &vertices[0]).norm()).fold(0.0, f64::max);
        let eps = 1e-12 * spread * spread;
        let m = pts.len();
        let mut turning = 0.0;
        let mut left = true;
        for k in 0..m {
            let (a, b, c) = (pts[k], pts[(k + 1) % m], pts[(k + 2) % m]);
            let (ux, uy, vx, vy) = (b[0] - a[0], b[1] - a[1], c[0] - b[0], c[1] - b[1]);
            let cr = ux * vy - uy * vx;
            left &= cr >= -eps;
            turning += cr.atan2(ux * vx + uy * vy);
        }
        let convex = left && (turning - 2.0 * std::f64::consts::PI).abs() < 1e-6;
        if !convex {
            let edge = |k: usize| (pts[k], pts[(k + 1) % m]);
            for i in 0..m {
                for k in i + 2..m {
                    if (k + 1) % m != i && segments_cross(edge(i), edge(k)) {
                        return Err(Error::InvalidPolytope(format!("polygon edges {i} and {k} intersect")));
                    }
                }
            }
        }
        Self::assemble(2, vertices, facets, Some(convex))
    }

    /// Planar set bounded by several disjoint simple loops, each an outer
    /// boundary (no holes). Every ring is oriented counter-clockwise.
    pub fn from_rings(rings: &[Vec<[f64; 2]>]) -> Result<Self> {
        if rings.is_empty() {
            return Err(Error::InvalidPolytope("no boundary loops".into()));
        }
        if rings.len() == 1 {
            return Self::polygon(&rings[0]);
        }
        let mut vertices = Vec::new();
        let mut facets = Vec::new();
        for ring in rings {
            let single = Self::polygon(ring)?;
            let base = vertices.len();
            vertices.extend(single.vertices.iter().cloned());
            facets.extend(single.facets.into_iter().map(|mut f| {
                f.vertices.iter_mut().for_each(|i| *i += base);
                f
            }));
        }
        Self::assemble(2, vertices, facets, Some(false))
    }

    /// Convex polygon from arbitrary points (planar convex hull).
    pub fn convex_polygon(points: &[[f64; 2]]) -> Result<Self> {
        let ring = monotone_chain(points);
        if ring.len() < 3 {
            return Err(Error::Degenerate { rank: ring.len().saturating_sub(1), dim: 2 });
        }
        let pts: Vec<[f64; 2]> = ring.iter().map(|&i| points[i]).collect();
        let mut p = Self::polygon(&pts)?;
        p.convex = true;
        Ok(p)
    }

    /// Closed triangulated surface in R^3; triangles are oriented
    /// counter-clockwise seen from outside.
    pub fn from_triangles(vertices: Vec<Vector>, triangles: &[[usize; 3]]) -> Result<Self> {
        let mut facets = Vec::with_capacity(triangles.len());
        for t in triangles {
            if t.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::InvalidPolytope("triangle index out of range".into()));
            }
            let c = cross3(&(&vertices[t[1]] - &vertices[t[0]]), &(&vertices[t[2]] - &vertices[t[0]]));
            let area2 = c.norm();
            if area2 == 0.0 {
                continue;
            }
            let normal = c / area2;
            let offset = normal.dot(&vertices[t[0]]);
            facets.push(Facet { normal, measure: 0.5 * area2, offset, vertices: t.to_vec() });
        }
        Self::assemble(3, vertices, facets, None)
    }

    /// Closed segment `[a, b]` in the plane, a null set whose two sides carry
    /// opposite normals.
    pub fn segment(a: [f64; 2], b: [f64; 2]) -> Result<Self> {
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        if !(len > 0.0) {
            return Err(Error::Degenerate { rank: 0, dim: 2 });
        }
        let normal = vector(&[dy / len, -dx / len]);
        let offset = normal[0] * a[0] + normal[1] * a[1];
        let facets = vec![
            Facet { normal: normal.clone(), measure: len, offset, vertices: vec![0, 1] },
            Facet { normal: -normal, measure: len, offset: -offset, vertices: vec![1, 0] },
        ];
        Self::assemble(2, vec![vector(&a), vector(&b)], facets, Some(true))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// Lebesgue measure, from the divergence theorem over the facet list.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Support function `max_x v . x` over the vertices.
    pub fn support(&self, v: &Vector) -> f64 {
        self.vertices.iter().map(|x| v.dot(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mean of the vertices.
    pub fn vertex_centroid(&self) -> Vector {
        centroid_of(self.dim, &self.vertices)
    }

    /// Centre of mass (for bodies with positive volume).
    pub fn centroid(&self) -> Vector {
        if self.volume <= 0.0 {
            return self.vertex_centroid();
        }
        if self.dim == 2 {
            // shoelace centroid from the oriented edges
            let mut c = Vector::zeros(2);
            for f in &self.facets {
                if f.vertices.len() != 2 {
                    return self.vertex_centroid();
                }
                let a = &self.vertices[f.vertices[0]];
                let b = &self.vertices[f.vertices[1]];
                let cr = a[0] * b[1] - a[1] * b[0];
                c += (a + b) * cr;
            }
            return c / (6.0 * self.volume);
        }
        if self.dim != 3 || self.facets.iter().any(|f| f.vertices.len() < 3) {
            return self.vertex_centroid();
        }
        // signed tetrahedra from the vertex centroid over fan-triangulated facet loops
        let o = self.vertex_centroid();
        let mut acc = Vector::zeros(3);
        let mut vol = 0.0;
        for f in &self.facets {
            let a = &self.vertices[f.vertices[0]];
            for k in 1..f.vertices.len() - 1 {
                let b = &self.vertices[f.vertices[k]];
                let c = &self.vertices[f.vertices[k + 1]];
                let v = cross3(&(b - a), &(c - a)).dot(&f.normal).abs() * (f.offset - f.normal.dot(&o)) / 6.0;
                acc += (&o + a + b + c) * (v / 4.0);
                vol += v;
            }
        }
        acc / vol
    }

    /// Dilation `r * P` about the origin.
    pub fn scaled(&self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("dilation factor must be positive, got {r}")));
        }
        let vertices = self.vertices.iter().map(|v| v * r).collect();
        let scale = r.powi(self.dim as i32 - 1);
        let facets = self
            .facets
            .iter()
            .map(|f| Facet { normal: f.normal.clone(), measure: f.measure * scale, offset: f.offset * r, vertices: f.vertices.clone() })
            .collect();
        Self::assemble(self.dim, vertices, facets, Some(self.convex))
    }

    /// Dilation by `r` about a centre point.
    pub fn scaled_about(&self, r: f64, center: &Vector) -> Result<Self> {
        self.translated(&-center)?.scaled(r)?.translated(center)
    }

    pub fn translated(&self, t: &Vector) -> Result<Self> {
        if t.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: t.len() });
        }
        let vertices = self.vertices.iter().map(|v| v + t).collect();
        let facets = self
            .facets
            .iter()
            .map(|f| Facet { normal: f.normal.clone(), measure: f.measure, offset: f.offset + f.normal.dot(t), vertices: f.vertices.clone() })
            .collect();
        Self::assemble(self.dim, vertices, facets, Some(self.convex))
    }

    /// Norm of the weighted normal sum relative to the total facet measure.
    pub fn closing_residual(&self) -> f64 {
        let mut s = Vector::zeros(self.dim);
        let mut total = 0.0;
        for f in &self.facets {
            s += &f.normal * f.measure;
            total += f.measure;
        }
        s.norm() / total
    }

    /// Largest distance of a vertex from the vertex centroid.
    pub fn radius(&self) -> f64 {
        let c = self.vertex_centroid();
        self.vertices.iter().map(|v| (v - &c).norm()).fold(0.0, f64::max)
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> (Vector, Vector) {
        let mut lo = Vector::from_element(self.dim, f64::INFINITY);
        let mut hi = Vector::from_element(self.dim, f64::NEG_INFINITY);
        for v in &self.vertices {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    /// Planar boundary edges as vertex coordinate pairs.
    pub fn edges_2d(&self) -> Result<Vec<([f64; 2], [f64; 2])>> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: self.dim });
        }
        self.facets
            .iter()
            .map(|f| {
                if f.vertices.len() != 2 {
                    return Err(Error::InvalidPolytope("planar facet without endpoints".into()));
                }
                let a = &self.vertices[f.vertices[0]];
                let b = &self.vertices[f.vertices[1]];
                Ok(([a[0], a[1]], [b[0], b[1]]))
            })
            .collect()
    }

    /// Vertex ring of a planar set bounded by a single closed loop, in
    /// counter-clockwise order.
    pub fn ring_2d(&self) -> Result<Vec<[f64; 2]>> {
        let edges = self.edges_2d()?;
        let mut next = std::collections::HashMap::new();
        for f in &self.facets {
            next.insert(f.vertices[0], f.vertices[1]);
        }
        let start = self.facets[0].vertices[0];
        let mut ring = vec![start];
        let mut cur = start;
        loop {
            cur = *next.get(&cur).ok_or_else(|| Error::InvalidPolytope("open boundary".into()))?;
            if cur == start {
                break;
            }
            ring.push(cur);
            if ring.len() > edges.len() {
                return Err(Error::InvalidPolytope("boundary is not a single loop".into()));
            }
        }
        if ring.len() != edges.len() {
            return Err(Error::InvalidPolytope("boundary has several loops".into()));
        }
        Ok(ring.into_iter().map(|i| [self.vertices[i][0], self.vertices[i][1]]).collect())
    }

    /// Point membership (closed set) with an absolute slack.
    ///
    /// Convex sets use facet inequalities in any dimension; non-convex sets
    /// are supported in the plane through the winding number of the edges.
    pub fn contains(&self, x: &Vector, slack: f64) -> Result<bool> {
        if self.convex {
            return Ok(self.facets.iter().all(|f| f.normal.dot(x) <= f.offset + slack));
        }
        if self.dim != 2 {
            return Err(Error::Unsupported("point membership for non-convex sets above the plane".into()));
        }
        let edges = self.edges_2d()?;
        let p = [x[0], x[1]];
        for (a, b) in &edges {
            if segment_distance(p, *a, *b) <= slack {
                return Ok(true);
            }
        }
        Ok(winding_number(p, &edges) != 0)
    }
}

fn centroid_of(dim: usize, vertices: &[Vector]) -> Vector {
    let mut c = Vector::zeros(dim);
    if vertices.is_empty() {
        return c;
    }
    for v in vertices {
        c += v;
    }
    c / vertices.len() as f64
}

fn detect_convex(vertices: &[Vector], facets: &[Facet]) -> bool {
    if vertices.is_empty() {
        return false;
    }
    let dim = vertices[0].len();
    let c = centroid_of(dim, vertices);
    let scale = vertices.iter().map(|v| (v - &c).norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let eps = 1e-9 * scale;
    facets.iter().all(|f| vertices.iter().all(|v| f.normal.dot(v) <= f.offset + eps))
}

/// Closed segments meet (touching counts).
pub(crate) fn segments_cross(p: ([f64; 2], [f64; 2]), q: ([f64; 2], [f64; 2])) -> bool {
    let d = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let (d1, d2, d3, d4) = (d(p.0, p.1, q.0), d(p.0, p.1, q.1), d(q.0, q.1, p.0), d(q.0, q.1, p.1));
    if d1 == 0.0 && d2 == 0.0 {
        // collinear: compare extents along the longer axis
        let axis = usize::from((p.1[1] - p.0[1]).abs() > (p.1[0] - p.0[0]).abs());
        let (a0, a1) = (p.0[axis].min(p.1[axis]), p.0[axis].max(p.1[axis]));
        let (b0, b1) = (q.0[axis].min(q.1[axis]), q.0[axis].max(q.1[axis]));
        return a0 <= b1 && b0 <= a1;
    }
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}

pub(crate) fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

pub(crate) fn winding_number(p: [f64; 2], edges: &[([f64; 2], [f64; 2])]) -> i32 {
    let mut w = 0;
    for (a, b) in edges {
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
        if a[1] <= p[1] {
            if b[1] > p[1] && cross > 0.0 {
                w += 1;
            }
        } else if b[1] <= p[1] && cross < 0.0 {
            w -= 1;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l_shape() -> Polytope {
        Polytope::polygon(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap()
    }

    #[test]
    fn self_intersecting_ring_rejected() {
        let bowtie = Polytope::polygon(&[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]);
        assert!(matches!(bowtie, Err(Error::InvalidPolytope(_))));
        // collinear but disjoint edges are fine
        let c = Polytope::polygon(&[[0.0, 0.0], [3.0, 0.0], [3.0, 1.0], [2.0, 1.0], [2.0, 0.5], [1.0, 0.5], [1.0, 1.0], [0.0, 1.0]]);
        assert!(c.is_ok());
    }

    #[test]
    fn diamond_area() {
        let p = Polytope::polygon(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]).unwrap();
        assert!((p.volume() - 2.0).abs() < 1e-14);
        assert!(p.is_convex());
    }

    #[test]
    fn clockwise_ring_is_reoriented() {
        let p = Polytope::polygon(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!((p.volume() - 1.0).abs() < 1e-14);
        let f = &p.facets()[0];
        // outward normals point away from the centre
        let mid = (&p.vertices()[f.vertices[0]] + &p.vertices()[f.vertices[1]]) * 0.5;
        assert!(f.normal.dot(&(mid - vector(&[0.5, 0.5]))) > 0.0);
    }

    #[test]
    fn l_shape_is_not_convex() {
        let p = l_shape();
        assert!(!p.is_convex());
        assert!((p.volume() - 3.0).abs() < 1e-14);
        assert!(p.contains(&vector(&[0.5, 1.5]), 0.0).unwrap());
        assert!(!p.contains(&vector(&[1.5, 1.5]), 0.0).unwrap());
        assert_eq!(p.ring_2d().unwrap().len(), 6);
    }

    #[test]
    fn support_values() {
        let p = Polytope::polygon(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]).unwrap();
        assert_eq!(p.support(&vector(&[1.0, 0.0])), 1.0);
        assert_eq!(p.support(&vector(&[1.0, 1.0])), 2.0);
        assert_eq!(p.support(&vector(&[0.0, 0.0])), 0.0);
    }

    #[test]
    fn open_boundary_is_rejected() {
        let vertices = vec![vector(&[0.0, 0.0]), vector(&[1.0, 0.0])];
        let facets = vec![Facet { normal: vector(&[0.0, -1.0]), measure: 1.0, offset: 0.0, vertices: vec![0, 1] }];
        assert!(matches!(Polytope::from_facets(2, vertices, facets), Err(Error::InvalidPolytope(_))));
    }

    #[test]
    fn empty_facets_rejected() {
        assert!(matches!(Polytope::from_facets(2, vec![], vec![]), Err(Error::InvalidPolytope(_))));
    }

    #[test]
    fn homogeneity() {
        let p = l_shape();
        for r in [0.5, 2.0, 10.0] {
            let q = p.scaled(r).unwrap();
            assert!((q.volume() - r * r * p.volume()).abs() <= 1e-10 * q.volume());
            for (a, b) in p.facets().iter().zip(q.facets()) {
                assert!((b.measure - r * a.measure).abs() <= 1e-10 * b.measure);
            }
        }
    }

    #[test]
    fn centroid_of_square() {
        let p = Polytope::polygon(&[[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]).unwrap();
        assert!((p.centroid() - vector(&[1.0, 1.0])).norm() < 1e-14);
    }

    #[test]
    fn segment_is_null_set() {
        let s = Polytope::segment([-1.0, 0.0], [1.0, 0.0]).unwrap();
        assert_eq!(s.volume(), 0.0);
        assert_eq!(s.facets().len(), 2);
    }
}
