use super::{cross3, orthogonal_basis, Facet, Polytope, Vector};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Affine rank of a point set (the dimension of its affine hull).
pub fn affine_rank(points: &[Vector]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let n = points[0].len();
    let base = &points[0];
    let rows = points.len() - 1;
    let m = DMatrix::from_fn(rows, n, |r, c| points[r + 1][c] - base[c]);
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * top).count()
}

/// Convex hull of a finite point set as a convex [`Polytope`].
///
/// The plane uses a monotone chain. In higher dimensions facets are found by
/// enumerating affinely independent point tuples and keeping the supporting
/// hyperplanes, which is exact up to the plane tolerance and robust for
/// coplanar input; facet measures come from the hull of the facet points in
/// one dimension less. The cost is O(C(N, n) N), meant for the few dozen
/// points the library feeds it.
pub fn convex_hull(points: &[Vector]) -> Result<Polytope> {
    let n = points.first().map(|p| p.len()).ok_or_else(|| Error::Degenerate { rank: 0, dim: 0 })?;
    if n < 2 {
        return Err(Error::Domain(format!("dimension must be at least 2, got {n}")));
    }
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: p.len() });
    }
    if points.iter().any(|p| p.iter().any(|c| !c.is_finite())) {
        return Err(Error::Domain("non-finite coordinate".into()));
    }
    let rank = affine_rank(points);
    if rank < n {
        return Err(Error::Degenerate { rank, dim: n });
    }
    let raw = hull_raw(points);
    let mut index = vec![usize::MAX; points.len()];
    let mut vertices = Vec::with_capacity(raw.vertices.len());
    for &i in &raw.vertices {
        index[i] = vertices.len();
        vertices.push(points[i].clone());
    }
    let facets = raw
        .facets
        .into_iter()
        .map(|f| Facet {
            normal: f.normal,
            measure: f.measure,
            offset: f.offset,
            vertices: f.points.iter().map(|&i| index[i]).collect(),
        })
        .collect();
    Polytope::assemble(n, vertices, facets, Some(true))
}

pub(crate) struct HullFacet {
    pub normal: Vector,
    pub offset: f64,
    /// Extreme points of the facet; a counter-clockwise loop seen from outside in R^3.
    pub points: Vec<usize>,
    pub measure: f64,
}

pub(crate) struct RawHull {
    pub vertices: Vec<usize>,
    pub facets: Vec<HullFacet>,
}

impl RawHull {
    pub fn volume(&self, points: &[Vector]) -> f64 {
        let d = points[0].len();
        let mut c = Vector::zeros(d);
        for &i in &self.vertices {
            c += &points[i];
        }
        c /= self.vertices.len() as f64;
        self.facets.iter().map(|f| f.measure * (f.offset - f.normal.dot(&c))).sum::<f64>() / d as f64
    }
}

fn scale_of(points: &[Vector]) -> f64 {
    let d = points[0].len();
    let mut c = Vector::zeros(d);
    for p in points {
        c += p;
    }
    c /= points.len() as f64;
    points.iter().map(|p| (p - &c).norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
}

/// Counter-clockwise extreme points of a planar set (collinear points dropped).
pub(crate) fn monotone_chain(points: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]).then(points[a][1].total_cmp(&points[b][1])));
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let mut scale: f64 = 0.0;
    for p in points {
        scale = scale.max(p[0].abs()).max(p[1].abs());
    }
    let (ox, oy) = (points[idx[0]][0], points[idx[0]][1]);
    let mut spread: f64 = 0.0;
    for &i in &idx {
        spread = spread.max((points[i][0] - ox).abs()).max((points[i][1] - oy).abs());
    }
    let eps = 1e-12 * spread * spread;
    let cross = |o: usize, a: usize, b: usize| {
        (points[a][0] - points[o][0]) * (points[b][1] - points[o][1])
            - (points[a][1] - points[o][1]) * (points[b][0] - points[o][0])
    };
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for &i in &idx {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= eps {
            hull.pop();
        }
        hull.push(i);
    }
    let lower = hull.len() + 1;
    for &i in idx.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= eps {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    hull
}

pub(crate) fn polygon_area(points: &[[f64; 2]], ring: &[usize]) -> f64 {
    let mut s = 0.0;
    for k in 0..ring.len() {
        let a = points[ring[k]];
        let b = points[ring[(k + 1) % ring.len()]];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

/// Hull of a full-rank point set in any dimension >= 2.
pub(crate) fn hull_raw(points: &[Vector]) -> RawHull {
    let d = points[0].len();
    if d == 2 {
        let flat: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
        let ring = monotone_chain(&flat);
        let mut facets = Vec::with_capacity(ring.len());
        for k in 0..ring.len() {
            let (a, b) = (ring[k], ring[(k + 1) % ring.len()]);
            let dx = flat[b][0] - flat[a][0];
            let dy = flat[b][1] - flat[a][1];
            let len = dx.hypot(dy);
            let normal = super::vector(&[dy / len, -dx / len]);
            let offset = normal[0] * flat[a][0] + normal[1] * flat[a][1];
            facets.push(HullFacet { normal, offset, points: vec![a, b], measure: len });
        }
        return RawHull { vertices: ring, facets };
    }

    let eps = 1e-9 * scale_of(points);
    let mut facets: Vec<HullFacet> = Vec::new();
    let mut on_facet: Vec<Vec<bool>> = Vec::new();
    let mut combo: Vec<usize> = (0..d).collect();
    let np = points.len();
    loop {
        let covered = on_facet.iter().any(|mask| combo.iter().all(|&i| mask[i]));
        if !covered {
            if let Some(normal) = hyperplane_normal(points, &combo) {
                let base = normal.dot(&points[combo[0]]);
                let (mut lo, mut hi) = (0.0f64, 0.0f64);
                for p in points {
                    let s = normal.dot(p) - base;
                    lo = lo.min(s);
                    hi = hi.max(s);
                }
                let oriented = if hi <= eps {
                    Some(normal)
                } else if lo >= -eps {
                    Some(-normal)
                } else {
                    None
                };
                if let Some(normal) = oriented {
                    let offset = normal.dot(&points[combo[0]]);
                    let mask: Vec<bool> = points.iter().map(|p| (normal.dot(p) - offset).abs() <= eps).collect();
                    let members: Vec<usize> = (0..np).filter(|&i| mask[i]).collect();
                    let (extreme, measure) = facet_hull(points, &members, &normal);
                    facets.push(HullFacet { normal, offset, points: extreme, measure });
                    on_facet.push(mask);
                }
            }
        }
        if !next_combination(&mut combo, np) {
            break;
        }
    }
    let mut used = vec![false; np];
    for f in &facets {
        for &i in &f.points {
            used[i] = true;
        }
    }
    let vertices = (0..np).filter(|&i| used[i]).collect();
    RawHull { vertices, facets }
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Unit normal of the hyperplane through `d` points of R^d, if they are
/// affinely independent.
fn hyperplane_normal(points: &[Vector], idx: &[usize]) -> Option<Vector> {
    let d = points[0].len();
    let p0 = &points[idx[0]];
    let normal = if d == 3 {
        cross3(&(&points[idx[1]] - p0), &(&points[idx[2]] - p0))
    } else {
        let rows = DMatrix::from_fn(d - 1, d, |r, c| points[idx[r + 1]][c] - p0[c]);
        Vector::from_fn(d, |i, _| {
            let minor = rows.clone().remove_column(i);
            let det = minor.determinant();
            if i % 2 == 0 {
                det
            } else {
                -det
            }
        })
    };
    let scale = idx[1..].iter().map(|&i| (&points[i] - p0).norm()).product::<f64>();
    let norm = normal.norm();
    if norm <= 1e-12 * scale || norm == 0.0 {
        None
    } else {
        Some(normal / norm)
    }
}

/// Extreme points and (d-1)-measure of the points lying on a facet.
fn facet_hull(points: &[Vector], members: &[usize], normal: &Vector) -> (Vec<usize>, f64) {
    let basis = orthogonal_basis(normal);
    let d = points[0].len();
    if d == 3 {
        let flat: Vec<[f64; 2]> = members.iter().map(|&i| [basis[0].dot(&points[i]), basis[1].dot(&points[i])]).collect();
        let ring = monotone_chain(&flat);
        let area = polygon_area(&flat, &ring);
        return (ring.into_iter().map(|k| members[k]).collect(), area);
    }
    let projected: Vec<Vector> =
        members.iter().map(|&i| Vector::from_fn(d - 1, |r, _| basis[r].dot(&points[i]))).collect();
    let sub = hull_raw(&projected);
    let measure = sub.volume(&projected);
    (sub.vertices.into_iter().map(|k| members[k]).collect(), measure)
}
