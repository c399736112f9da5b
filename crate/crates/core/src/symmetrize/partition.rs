use crate::error::{Error, Result};
use crate::geometry::{orthogonal_basis, vector, Polytope, Vector};

/// Facets with `|nu . u|` at most this are treated as exactly parallel to `u`.
pub(crate) const VERTICAL_TOL: f64 = 1e-13;
/// Facets with `|nu . u|` between [`VERTICAL_TOL`] and this are too close to
/// parallel to be handled without perturbation.
pub(crate) const ORTHOGONAL_TOL: f64 = 1e-8;

/// Affine function `t(z) = constant + gradient . z` on `u^perp`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub constant: f64,
    pub gradient: Vec<f64>,
}

impl Affine {
    pub fn zero(k: usize) -> Self {
        Self { constant: 0.0, gradient: vec![0.0; k] }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.constant + self.gradient.iter().zip(z).map(|(g, x)| g * x).sum::<f64>()
    }

    fn add_scaled(&mut self, other: &Affine, s: f64) {
        self.constant += s * other.constant;
        for (g, o) in self.gradient.iter_mut().zip(&other.gradient) {
            *g += s * o;
        }
    }
}

/// Orthonormal frame `(b_1, .., b_(n-1), u)` with positive orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub direction: Vector,
    pub basis: Vec<Vector>,
}

impl Frame {
    pub fn new(u: &Vector) -> Result<Self> {
        let n = u.len();
        if !(2..=3).contains(&n) {
            return Err(Error::Unsupported(format!("Steiner symmetrization in dimension {n}")));
        }
        let norm = u.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("direction must be a non-zero vector".into()));
        }
        let u = u / norm;
        let basis = if n == 2 { vec![vector(&[u[1], -u[0]])] } else { orthogonal_basis(&u) };
        Ok(Self { direction: u, basis })
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    /// Coordinates `(z, t)` of a point.
    pub fn coords(&self, x: &Vector) -> (Vec<f64>, f64) {
        (self.basis.iter().map(|b| b.dot(x)).collect(), self.direction.dot(x))
    }

    pub fn point(&self, z: &[f64], t: f64) -> Vector {
        let mut x = &self.direction * t;
        for (b, c) in self.basis.iter().zip(z) {
            x += b * *c;
        }
        x
    }
}

/// Region of `u^perp` over which the chords of the set vary affinely: an
/// interval in the plane, a convex polygon (counter-clockwise) in space.
#[derive(Debug, Clone, PartialEq)]
pub enum CellShape {
    Interval(f64, f64),
    Polygon(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub shape: CellShape,
    /// Chords `[g, f]` over the cell, bottom to top.
    pub chords: Vec<(Affine, Affine)>,
}

impl Cell {
    /// Chord length `m = sum (f - g)`.
    pub fn length(&self) -> Affine {
        let k = match self.shape {
            CellShape::Interval(..) => 1,
            CellShape::Polygon(_) => 2,
        };
        let mut m = Affine::zero(k);
        for (g, f) in &self.chords {
            m.add_scaled(f, 1.0);
            m.add_scaled(g, -1.0);
        }
        m
    }

    /// (n-1)-dimensional measure of the cell.
    pub fn measure(&self) -> f64 {
        match &self.shape {
            CellShape::Interval(a, b) => b - a,
            CellShape::Polygon(p) => signed_area(p),
        }
    }

    pub fn centroid(&self) -> Vec<f64> {
        match &self.shape {
            CellShape::Interval(a, b) => vec![0.5 * (a + b)],
            CellShape::Polygon(p) => {
                let c = polygon_centroid(p);
                vec![c[0], c[1]]
            }
        }
    }

    pub fn contains(&self, z: &[f64], slack: f64) -> bool {
        match &self.shape {
            CellShape::Interval(a, b) => z[0] >= a - slack && z[0] <= b + slack,
            CellShape::Polygon(p) => (0..p.len()).all(|k| {
                let (a, b) = (p[k], p[(k + 1) % p.len()]);
                let len = (b[0] - a[0]).hypot(b[1] - a[1]);
                cross(a, b, [z[0], z[1]]) >= -slack * len
            }),
        }
    }

    /// Volume of the set above the cell, the integral of `m`.
    pub fn volume(&self) -> f64 {
        self.measure() * self.length().eval(&self.centroid())
    }
}

/// Decomposition of the shadow of a polyhedral set on `u^perp` into cells
/// carrying affine chord endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordPartition {
    frame: Frame,
    cells: Vec<Cell>,
}

impl ChordPartition {
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn direction(&self) -> &Vector {
        &self.frame.direction
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Total chord length `m(z)` over a point of `u^perp` (in frame
    /// coordinates); zero off the shadow.
    pub fn length_at(&self, z: &[f64]) -> f64 {
        self.cells.iter().find(|c| c.contains(z, 0.0)).map_or(0.0, |c| c.length().eval(z).max(0.0))
    }

    pub fn volume(&self) -> f64 {
        self.cells.iter().map(Cell::volume).sum()
    }
}

struct Sheet {
    plane: Affine,
    top: bool,
}

fn facet_sheet(frame: &Frame, normal: &Vector, offset: f64) -> Result<Option<Sheet>> {
    let nt = normal.dot(&frame.direction);
    if nt.abs() <= VERTICAL_TOL {
        return Ok(None);
    }
    if nt.abs() < ORTHOGONAL_TOL {
        return Err(Error::OrthogonalFacet { attempts: 0 });
    }
    // nu_z . z + nu_t t = offset
    let gradient = frame.basis.iter().map(|b| -normal.dot(b) / nt).collect();
    Ok(Some(Sheet { plane: Affine { constant: offset / nt, gradient }, top: nt > 0.0 }))
}

/// Pairs sheet crossings into chords by walking upward: crossing a bottom
/// sheet enters the set, crossing a top sheet leaves it.
fn chords_at(z: &[f64], sheets: &[&Sheet]) -> Vec<(Affine, Affine)> {
    let mut order: Vec<(f64, bool, &Affine)> = sheets.iter().map(|s| (s.plane.eval(z), s.top, &s.plane)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    let mut chords = Vec::new();
    let mut depth = 0i32;
    let mut start: Option<&Affine> = None;
    for (_, top, plane) in order {
        if top {
            if depth == 1 {
                if let Some(g) = start.take() {
                    chords.push((g.clone(), plane.clone()));
                }
            }
            depth = (depth - 1).max(0);
        } else {
            depth += 1;
            if depth == 1 {
                start = Some(plane);
            }
        }
    }
    chords
}

/// Chord partition of `e` along the unit direction `u`.
///
/// Facets exactly parallel to `u` are skipped: they only bound jumps of the
/// chord length. Facets within `1e-8` of parallel (but not exactly parallel)
/// give [`Error::OrthogonalFacet`].
pub fn chord_partition(e: &Polytope, u: &Vector) -> Result<ChordPartition> {
    if u.len() != e.dim() {
        return Err(Error::DimensionMismatch { expected: e.dim(), got: u.len() });
    }
    let frame = Frame::new(u)?;
    let cells = match e.dim() {
        2 => partition_2d(e, &frame)?,
        _ => partition_3d(e, &frame)?,
    };
    Ok(ChordPartition { frame, cells })
}

fn scale_of(zs: impl Iterator<Item = f64> + Clone) -> f64 {
    let lo = zs.clone().fold(f64::INFINITY, f64::min);
    let hi = zs.fold(f64::NEG_INFINITY, f64::max);
    (hi - lo).max(lo.abs()).max(hi.abs()).max(f64::MIN_POSITIVE)
}

fn partition_2d(e: &Polytope, frame: &Frame) -> Result<Vec<Cell>> {
    let zs: Vec<f64> = e.vertices().iter().map(|x| frame.basis[0].dot(x)).collect();
    let eps = 1e-12 * scale_of(zs.iter().cloned());
    let mut edges: Vec<(f64, f64, Sheet)> = Vec::new();
    for f in e.facets() {
        if f.vertices.len() != 2 {
            return Err(Error::InvalidPolytope("planar facet without endpoints".into()));
        }
        if let Some(sheet) = facet_sheet(frame, &f.normal, f.offset)? {
            let (a, b) = (zs[f.vertices[0]], zs[f.vertices[1]]);
            edges.push((a.min(b), a.max(b), sheet));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut breaks = zs.clone();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= eps);

    let mut cells = Vec::new();
    let mut next = 0;
    let mut active: Vec<usize> = Vec::new();
    for w in breaks.windows(2) {
        let (z0, z1) = (w[0], w[1]);
        let mid = 0.5 * (z0 + z1);
        while next < edges.len() && edges[next].0 < mid {
            active.push(next);
            next += 1;
        }
        active.retain(|&k| edges[k].1 > mid);
        if active.is_empty() {
            continue;
        }
        let sheets: Vec<&Sheet> = active.iter().map(|&k| &edges[k].2).collect();
        let chords = chords_at(&[mid], &sheets);
        if !chords.is_empty() {
            cells.push(Cell { shape: CellShape::Interval(z0, z1), chords });
        }
    }
    Ok(cells)
}

fn partition_3d(e: &Polytope, frame: &Frame) -> Result<Vec<Cell>> {
    let zs: Vec<[f64; 2]> = e.vertices().iter().map(|x| [frame.basis[0].dot(x), frame.basis[1].dot(x)]).collect();
    let scale = scale_of(zs.iter().flat_map(|z| z.iter().cloned()));
    let eps = 1e-12 * scale;
    let tiny = 1e-15 * scale * scale;

    let mut sheets = Vec::new();
    let mut shadows: Vec<Vec<[f64; 2]>> = Vec::new();
    for f in e.facets() {
        if f.vertices.len() < 3 {
            return Err(Error::InvalidPolytope("facets in R^3 need vertex loops".into()));
        }
        if let Some(sheet) = facet_sheet(frame, &f.normal, f.offset)? {
            let mut poly: Vec<[f64; 2]> = f.vertices.iter().map(|&i| zs[i]).collect();
            if signed_area(&poly) < 0.0 {
                poly.reverse();
            }
            if signed_area(&poly) > tiny {
                sheets.push(sheet);
                shadows.push(poly);
            }
        }
    }
    if sheets.is_empty() {
        return Ok(Vec::new());
    }

    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in shadows.iter().flatten() {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let pad = 1e-6 * scale;
    let (lo, hi) = ([lo[0] - pad, lo[1] - pad], [hi[0] + pad, hi[1] + pad]);
    let mut regions: Vec<Region> =
        vec![Region { poly: vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]], bbox: (lo, hi), sheets: Vec::new() }];

    for (idx, shadow) in shadows.iter().enumerate() {
        let sb = bbox(shadow);
        let mut out = Vec::with_capacity(regions.len() + 8);
        for region in regions {
            if !overlaps(&region.bbox, &sb, eps) {
                out.push(region);
                continue;
            }
            if shadow_contains(shadow, &region.poly, eps) {
                let mut r = region;
                r.sheets.push(idx);
                out.push(r);
                continue;
            }
            let mut inner = region.poly.clone();
            for k in 0..shadow.len() {
                inner = clip(&inner, shadow[k], shadow[(k + 1) % shadow.len()], true, eps);
                if inner.len() < 3 {
                    break;
                }
            }
            if inner.len() < 3 || signed_area(&inner) <= tiny {
                out.push(region);
                continue;
            }
            let mut rest = region.poly.clone();
            for k in 0..shadow.len() {
                let (a, b) = (shadow[k], shadow[(k + 1) % shadow.len()]);
                let outside = clip(&rest, a, b, false, eps);
                if outside.len() >= 3 && signed_area(&outside) > tiny {
                    out.push(Region::new(outside, region.sheets.clone()));
                }
                rest = clip(&rest, a, b, true, eps);
                if rest.len() < 3 {
                    break;
                }
            }
            let mut with = region.sheets;
            with.push(idx);
            out.push(Region::new(inner, with));
        }
        regions = out;
    }

    let mut cells = Vec::new();
    for r in regions {
        if r.sheets.is_empty() {
            continue;
        }
        let c = polygon_centroid(&r.poly);
        let crossing: Vec<&Sheet> = r.sheets.iter().map(|&k| &sheets[k]).collect();
        let chords = chords_at(&c, &crossing);
        if !chords.is_empty() {
            cells.push(Cell { shape: CellShape::Polygon(r.poly), chords });
        }
    }
    Ok(cells)
}

struct Region {
    poly: Vec<[f64; 2]>,
    bbox: ([f64; 2], [f64; 2]),
    sheets: Vec<usize>,
}

impl Region {
    fn new(poly: Vec<[f64; 2]>, sheets: Vec<usize>) -> Self {
        Self { bbox: bbox(&poly), poly, sheets }
    }
}

fn bbox(p: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for q in p {
        for i in 0..2 {
            lo[i] = lo[i].min(q[i]);
            hi[i] = hi[i].max(q[i]);
        }
    }
    (lo, hi)
}

fn overlaps(a: &([f64; 2], [f64; 2]), b: &([f64; 2], [f64; 2]), eps: f64) -> bool {
    (0..2).all(|i| a.0[i] < b.1[i] - eps && b.0[i] < a.1[i] - eps)
}

fn shadow_contains(shadow: &[[f64; 2]], poly: &[[f64; 2]], eps: f64) -> bool {
    (0..shadow.len()).all(|k| {
        let (a, b) = (shadow[k], shadow[(k + 1) % shadow.len()]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        poly.iter().all(|&p| cross(a, b, p) >= -eps * len)
    })
}

pub(crate) fn cross(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
}

/// Sutherland-Hodgman step against the line through `a`, `b`; keeps the left
/// side or the right side. Vertices within `eps` of the line stay on it.
pub(crate) fn clip(poly: &[[f64; 2]], a: [f64; 2], b: [f64; 2], keep_left: bool, eps: f64) -> Vec<[f64; 2]> {
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    let side = |p: [f64; 2]| {
        let d = cross(a, b, p) / len;
        let d = if keep_left { d } else { -d };
        if d.abs() <= eps {
            0.0
        } else {
            d
        }
    };
    let mut out = Vec::with_capacity(poly.len() + 2);
    for k in 0..poly.len() {
        let (p, q) = (poly[k], poly[(k + 1) % poly.len()]);
        let (dp, dq) = (side(p), side(q));
        if dp >= 0.0 {
            out.push(p);
        }
        if (dp > 0.0 && dq < 0.0) || (dp < 0.0 && dq > 0.0) {
            let s = dp / (dp - dq);
            out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
        }
    }
    out
}

pub(crate) fn signed_area(p: &[[f64; 2]]) -> f64 {
    let mut s = 0.0;
    for k in 0..p.len() {
        let (a, b) = (p[k], p[(k + 1) % p.len()]);
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

pub(crate) fn polygon_centroid(p: &[[f64; 2]]) -> [f64; 2] {
    let (mut cx, mut cy, mut a) = (0.0, 0.0, 0.0);
    let o = p[0];
    for k in 1..p.len().saturating_sub(1) {
        let (b, c) = (p[k], p[k + 1]);
        let w = cross(o, b, c);
        cx += w * (o[0] + b[0] + c[0]);
        cy += w * (o[1] + b[1] + c[1]);
        a += w;
    }
    if a.abs() <= f64::MIN_POSITIVE {
        let n = p.len() as f64;
        return [p.iter().map(|q| q[0]).sum::<f64>() / n, p.iter().map(|q| q[1]).sum::<f64>() / n];
    }
    [cx / (3.0 * a), cy / (3.0 * a)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{diamond, rectangle, unit_cube};
    use crate::geometry::axis;

    #[test]
    fn unit_square_is_one_cell() {
        let p = chord_partition(&rectangle(0.0, 0.0, 1.0, 1.0).unwrap(), &axis(2, 1)).unwrap();
        assert_eq!(p.cells().len(), 1);
        let m = p.cells()[0].length();
        assert!((m.constant - 1.0).abs() < 1e-15 && m.gradient[0].abs() < 1e-15);
    }

    #[test]
    fn diamond_chord_lengths() {
        let p = chord_partition(&diamond(1.0).unwrap(), &axis(2, 1)).unwrap();
        assert_eq!(p.cells().len(), 2);
        for k in 0..=20 {
            let z = -1.0 + 0.1 * k as f64;
            assert!((p.length_at(&[z]) - 2.0 * (1.0 - z.abs())).abs() < 1e-14);
        }
        assert!((p.volume() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn c_shape_has_split_chords() {
        let c = Polytope::polygon(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [2.0, 2.0], [2.0, 3.0], [0.0, 3.0]])
            .unwrap();
        let p = chord_partition(&c, &axis(2, 1)).unwrap();
        let split: Vec<&Cell> = p.cells().iter().filter(|c| c.chords.len() == 2).collect();
        assert_eq!(split.len(), 1);
        // interval arithmetic along x: (0, 1) -> [0, 3], (1, 2) -> [0, 1] u [2, 3]
        for (x, m) in [(0.5, 3.0), (1.5, 2.0), (1.99, 2.0)] {
            assert!((p.length_at(&[x]) - m).abs() < 1e-14, "{x}");
        }
        assert!((p.volume() - 5.0).abs() < 1e-13);
    }

    #[test]
    fn l_shape_chords() {
        let l = Polytope::polygon(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        let p = chord_partition(&l, &axis(2, 1)).unwrap();
        assert_eq!(p.cells().len(), 2);
        assert!((p.length_at(&[0.5]) - 2.0).abs() < 1e-14);
        assert!((p.length_at(&[1.5]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cube_partition_volume() {
        let u = vector(&[0.3, -0.5, 0.8]).normalize();
        let p = chord_partition(&unit_cube(3), &u).unwrap();
        assert!((p.volume() - 1.0).abs() < 1e-12, "{}", p.volume());
        let a = chord_partition(&unit_cube(3), &axis(3, 2)).unwrap();
        assert!((a.volume() - 1.0).abs() < 1e-12);
        assert_eq!(a.cells().len(), 1);
    }

    #[test]
    fn nearly_parallel_facet_is_rejected() {
        let u = vector(&[1e-10, 1.0]).normalize();
        let r = chord_partition(&rectangle(0.0, 0.0, 1.0, 1.0).unwrap(), &u);
        assert!(matches!(r, Err(Error::OrthogonalFacet { .. })));
    }
}
