use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::partition::{chord_partition, cross, signed_area, CellShape, ChordPartition, Frame};
use crate::error::{Error, Result};
use crate::functionals::affine_perimeter_with;
use crate::geometry::{classical_perimeter, surface_area_measure, Facet, LinearMap, Polytope, Vector};
use crate::sphere::{default_integrator, Integrator};

const PERTURBATION_ATTEMPTS: usize = 8;
const MAX_ANGLE: f64 = 1e-6;

/// Rotation applied before symmetrizing when a facet was nearly parallel to
/// the direction; the output is rotated back.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Perturbation {
    /// Rotation axis (in `u^perp`); empty in the plane.
    pub axis: Vec<f64>,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub angle: f64,
    pub attempts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteinerResult {
    #[serde(serialize_with = "crate::io::ser_polytope")]
    pub input: Polytope,
    #[serde(serialize_with = "crate::io::ser_vector")]
    pub direction: Vector,
    #[serde(serialize_with = "crate::io::ser_polytope")]
    pub output: Polytope,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub perimeter_before: f64,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub perimeter_after: f64,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub classical_before: f64,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub classical_after: f64,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub volume_before: f64,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub volume_after: f64,
    pub perturbation: Option<Perturbation>,
}

impl SteinerResult {
    pub fn volume_error(&self) -> f64 {
        (self.volume_after - self.volume_before).abs() / self.volume_before.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn steiner(e: &Polytope, u: &Vector) -> Result<SteinerResult> {
    steiner_with(e, u, default_integrator())
}

/// Steiner symmetral `{z + t u : |t| <= m(z)/2}` of `e` together with its
/// affine and classical perimeters before and after.
pub fn steiner_with(e: &Polytope, u: &Vector, integrator: &Integrator) -> Result<SteinerResult> {
    let (output, perturbation) = symmetral(e, u)?;
    let direction = u / u.norm();
    Ok(SteinerResult {
        perimeter_before: affine_perimeter_with(e, integrator)?,
        perimeter_after: affine_perimeter_with(&output, integrator)?,
        classical_before: classical_perimeter(&surface_area_measure(e)?),
        classical_after: classical_perimeter(&surface_area_measure(&output)?),
        volume_before: e.volume(),
        volume_after: output.volume(),
        input: e.clone(),
        direction,
        output,
        perturbation,
    })
}

pub(crate) fn symmetral(e: &Polytope, u: &Vector) -> Result<(Polytope, Option<Perturbation>)> {
    match build(e, u) {
        Err(Error::OrthogonalFacet { .. }) => {}
        other => return other.map(|p| (p, None)),
    }
    let frame = Frame::new(u)?;
    for attempt in 1..=PERTURBATION_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5745_494e + attempt as u64);
        let angle = rng.random_range(0.5 * MAX_ANGLE..MAX_ANGLE);
        let (rotation, axis) = if e.dim() == 2 {
            (rotation_2d(angle), Vec::new())
        } else {
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            let axis = &frame.basis[0] * phi.cos() + &frame.basis[1] * phi.sin();
            (rotation_3d(&axis, angle), axis.iter().cloned().collect())
        };
        let forward = LinearMap::linear(rotation.clone())?;
        let back = LinearMap::linear(rotation.transpose())?;
        match build(&forward.apply_map(e)?, u) {
            Ok(s) => return Ok((back.apply_map(&s)?, Some(Perturbation { axis, angle, attempts: attempt }))),
            Err(Error::OrthogonalFacet { .. }) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(Error::OrthogonalFacet { attempts: PERTURBATION_ATTEMPTS })
}

fn rotation_2d(a: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()])
}

fn rotation_3d(axis: &Vector, a: f64) -> DMatrix<f64> {
    let k = DMatrix::from_row_slice(3, 3, &[0.0, -axis[2], axis[1], axis[2], 0.0, -axis[0], -axis[1], axis[0], 0.0]);
    DMatrix::identity(3, 3) + &k * a.sin() + &k * &k * (1.0 - a.cos())
}

fn build(e: &Polytope, u: &Vector) -> Result<Polytope> {
    let partition = chord_partition(e, u)?;
    if partition.cells().is_empty() {
        return Err(Error::Degenerate { rank: e.dim() - 1, dim: e.dim() });
    }
    let scale = e.radius().max(e.vertex_centroid().norm()).max(f64::MIN_POSITIVE);
    match e.dim() {
        2 => build_2d(&partition, scale),
        _ => build_3d(&partition, scale, e.is_convex()),
    }
}

fn build_2d(partition: &ChordPartition, scale: f64) -> Result<Polytope> {
    let frame = partition.frame();
    let eps = 1e-12 * scale;
    // upper profile (z, m/2) of each connected piece
    let mut pieces: Vec<Vec<[f64; 2]>> = Vec::new();
    let mut last_z = f64::NAN;
    for cell in partition.cells() {
        let CellShape::Interval(z0, z1) = cell.shape else { unreachable!() };
        let m = cell.length();
        let (h0, h1) = (0.5 * m.eval(&[z0]).max(0.0), 0.5 * m.eval(&[z1]).max(0.0));
        let joined = (z0 - last_z).abs() <= eps && pieces.last().is_some_and(|p| p.last().unwrap()[1] > eps);
        if !joined {
            pieces.push(Vec::new());
        }
        let piece = pieces.last_mut().unwrap();
        for q in [[z0, h0], [z1, h1]] {
            if piece.last().is_none_or(|l| (l[0] - q[0]).abs() > eps || (l[1] - q[1]).abs() > eps) {
                piece.push(q);
            }
        }
        last_z = z1;
    }
    let mut rings = Vec::with_capacity(pieces.len());
    for top in pieces {
        let mut ring: Vec<[f64; 2]> = top.iter().map(|q| [q[0], -q[1]]).collect();
        ring.extend(top.iter().rev().cloned());
        let ring = simplify_ring(ring, eps);
        if ring.len() < 3 {
            continue;
        }
        rings.push(
            ring.iter()
                .map(|q| {
                    let x = frame.point(&q[..1], q[1]);
                    [x[0], x[1]]
                })
                .collect(),
        );
    }
    Polytope::from_rings(&rings)
}

/// Drops repeated and collinear ring vertices.
fn simplify_ring(ring: Vec<[f64; 2]>, eps: f64) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(ring.len());
    for q in ring {
        if pts.last().is_none_or(|l: &[f64; 2]| (l[0] - q[0]).abs() > eps || (l[1] - q[1]).abs() > eps) {
            pts.push(q);
        }
    }
    while pts.len() > 1 && {
        let (f, l) = (pts[0], pts[pts.len() - 1]);
        (f[0] - l[0]).abs() <= eps && (f[1] - l[1]).abs() <= eps
    } {
        pts.pop();
    }
    let mut changed = true;
    while changed && pts.len() > 3 {
        changed = false;
        let mut out: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
        let n = pts.len();
        let mut k = 0;
        while k < n {
            let a = if let Some(l) = out.last() { *l } else { pts[(k + n - 1) % n] };
            let (b, c) = (pts[k], pts[(k + 1) % n]);
            let (ux, uy, vx, vy) = (b[0] - a[0], b[1] - a[1], c[0] - b[0], c[1] - b[1]);
            let len = (c[0] - a[0]).hypot(c[1] - a[1]);
            if cross(a, b, c).abs() <= eps * len && ux * vx + uy * vy > 0.0 && out.len() + (n - k) > 3 {
                changed = true;
            } else {
                out.push(b);
            }
            k += 1;
        }
        pts = out;
    }
    pts
}

struct VertexPool {
    index: HashMap<[i64; 3], usize>,
    points: Vec<Vector>,
    quantum: f64,
}

impl VertexPool {
    fn id(&mut self, x: Vector) -> usize {
        let key = [0, 1, 2].map(|i| (x[i] / self.quantum).round() as i64);
        *self.index.entry(key).or_insert_with(|| {
            self.points.push(x);
            self.points.len() - 1
        })
    }
}

struct WallEdge {
    cell: usize,
    s0: f64,
    s1: f64,
    left: bool,
    angle: f64,
    offset: f64,
    direction: [f64; 2],
}

fn build_3d(partition: &ChordPartition, scale: f64, convex: bool) -> Result<Polytope> {
    let frame = partition.frame();
    let eps = 1e-12 * scale;
    let mut pool = VertexPool { index: HashMap::new(), points: Vec::new(), quantum: 1e-9 * scale };
    let mut facets = Vec::new();
    let mut edges = Vec::new();
    let lengths: Vec<_> = partition.cells().iter().map(|c| c.length()).collect();
    // generic reference direction for orienting cell edges consistently
    let reference = [0.819_152_044_288_991_8, 0.573_576_436_351_046];

    for (ci, cell) in partition.cells().iter().enumerate() {
        let CellShape::Polygon(poly) = &cell.shape else { unreachable!() };
        let m = &lengths[ci];
        let heights: Vec<f64> = poly.iter().map(|z| 0.5 * m.eval(z).max(0.0)).collect();
        if heights.iter().all(|&h| h <= eps) {
            continue;
        }
        let area = signed_area(poly);
        let slope = (0.25 * (m.gradient[0].powi(2) + m.gradient[1].powi(2)) + 1.0).sqrt();
        for sign in [1.0, -1.0] {
            let mut loop_ids: Vec<usize> = poly.iter().zip(&heights).map(|(z, h)| pool.id(frame.point(z, sign * h))).collect();
            if sign < 0.0 {
                loop_ids.reverse();
            }
            loop_ids.dedup();
            while loop_ids.len() > 1 && loop_ids.first() == loop_ids.last() {
                loop_ids.pop();
            }
            let normal = frame.point(&[-0.5 * m.gradient[0], -0.5 * m.gradient[1]], sign) / slope;
            let offset = normal.dot(&pool.points[loop_ids[0]]);
            facets.push(Facet { normal, measure: area * slope, offset, vertices: loop_ids });
        }
        for k in 0..poly.len() {
            let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            if len <= eps {
                continue;
            }
            let mut d = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
            let mut left = true;
            if d[0] * reference[0] + d[1] * reference[1] < 0.0 {
                d = [-d[0], -d[1]];
                left = false;
            }
            let (sa, sb) = (d[0] * a[0] + d[1] * a[1], d[0] * b[0] + d[1] * b[1]);
            edges.push(WallEdge {
                cell: ci,
                s0: sa.min(sb),
                s1: sa.max(sb),
                left,
                angle: d[1].atan2(d[0]),
                offset: d[0] * a[1] - d[1] * a[0],
                direction: d,
            });
        }
    }

    // group cell edges by supporting line
    edges.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    let mut groups: Vec<Vec<WallEdge>> = Vec::new();
    let mut angle_cluster: Vec<WallEdge> = Vec::new();
    let flush = |cluster: &mut Vec<WallEdge>, groups: &mut Vec<Vec<WallEdge>>| {
        cluster.sort_by(|a, b| a.offset.total_cmp(&b.offset));
        let mut current: Vec<WallEdge> = Vec::new();
        for e in cluster.drain(..) {
            if current.last().is_some_and(|l| (e.offset - l.offset).abs() > 1e-9 * scale) {
                groups.push(std::mem::take(&mut current));
            }
            current.push(e);
        }
        if !current.is_empty() {
            groups.push(current);
        }
    };
    for e in edges {
        if angle_cluster.last().is_some_and(|l| (e.angle - l.angle).abs() > 1e-9) {
            flush(&mut angle_cluster, &mut groups);
        }
        angle_cluster.push(e);
    }
    flush(&mut angle_cluster, &mut groups);

    for group in &groups {
        let d = group[0].direction;
        let c = group[0].offset;
        let at = |s: f64| [s * d[0] - c * d[1], s * d[1] + c * d[0]];
        let mut breaks: Vec<f64> = group.iter().flat_map(|e| [e.s0, e.s1]).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() <= eps);
        for w in breaks.windows(2) {
            let (sa, sb) = (w[0], w[1]);
            if sb - sa <= eps {
                continue;
            }
            let mid = 0.5 * (sa + sb);
            let side = |left: bool| group.iter().find(|e| e.left == left && e.s0 <= mid && e.s1 >= mid).map(|e| e.cell);
            let (cl, cr) = (side(true), side(false));
            let height = |cell: Option<usize>, s: f64| cell.map_or(0.0, |k| 0.5 * lengths[k].eval(&at(s)).max(0.0));
            let (la, lb, ra, rb) = (height(cl, sa), height(cl, sb), height(cr, sa), height(cr, sb));
            let (da, db) = (la - ra, lb - rb);
            if da.abs() <= eps && db.abs() <= eps {
                continue;
            }
            let mut pieces = vec![(sa, sb)];
            if da * db < 0.0 {
                let s = sa + (sb - sa) * da / (da - db);
                pieces = vec![(sa, s), (s, sb)];
            }
            for (p0, p1) in pieces {
                let mid = 0.5 * (p0 + p1);
                let sign = if height(cl, mid) > height(cr, mid) { 1.0 } else { -1.0 };
                // left side taller: the wall faces right
                let nz = [sign * d[1], -sign * d[0]];
                let hs = [(height(cl, p0), height(cr, p0)), (height(cl, p1), height(cr, p1))];
                let measure = 0.5 * (p1 - p0) * ((hs[0].0 - hs[0].1).abs() + (hs[1].0 - hs[1].1).abs());
                if measure <= eps * eps {
                    continue;
                }
                for tsign in [1.0, -1.0] {
                    let corners = [
                        frame.point(&at(p0), tsign * hs[0].0.min(hs[0].1)),
                        frame.point(&at(p1), tsign * hs[1].0.min(hs[1].1)),
                        frame.point(&at(p1), tsign * hs[1].0.max(hs[1].1)),
                        frame.point(&at(p0), tsign * hs[0].0.max(hs[0].1)),
                    ];
                    let normal = frame.point(&nz, 0.0);
                    let mut ids: Vec<usize> = corners.into_iter().map(|x| pool.id(x)).collect();
                    ids.dedup();
                    while ids.len() > 1 && ids.first() == ids.last() {
                        ids.pop();
                    }
                    if ids.len() < 3 {
                        continue;
                    }
                    let p = &pool.points;
                    let turn = crate::geometry::cross3(&(&p[ids[1]] - &p[ids[0]]), &(&p[ids[2]] - &p[ids[0]]));
                    if turn.dot(&normal) < 0.0 {
                        ids.reverse();
                    }
                    let offset = normal.dot(&pool.points[ids[0]]);
                    facets.push(Facet { normal, measure, offset, vertices: ids });
                }
            }
        }
    }
    Polytope::assemble(3, pool.points, facets, if convex { Some(true) } else { None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{diamond, rectangle, unit_cube};
    use crate::geometry::{axis, vector};
    use std::f64::consts::PI;

    #[test]
    fn centred_square_is_fixed() {
        let sq = rectangle(-0.5, -0.5, 0.5, 0.5).unwrap();
        let r = steiner(&sq, &axis(2, 1)).unwrap();
        assert_eq!(r.output.vertices().len(), 4);
        for v in r.output.vertices() {
            assert!(sq.vertices().iter().any(|w| (v - w).norm() < 1e-15));
        }
        assert!((r.perimeter_after - r.perimeter_before).abs() < 1e-12);
        assert!(r.perturbation.is_none());
    }

    #[test]
    fn diamond_along_diagonal() {
        let u = vector(&[1.0, 1.0]).normalize();
        let r = steiner(&diamond(1.0).unwrap(), &u).unwrap();
        assert!((r.volume_after - 2.0).abs() < 1e-14);
        // the diamond is a square with sides along the diagonals: already symmetric about u^perp
        assert!((r.perimeter_after - r.perimeter_before).abs() < 1e-12);
        assert!(r.output.is_convex());
    }

    #[test]
    fn stacked_squares_collapse() {
        let two = Polytope::from_rings(&[
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0.0, 3.0], [1.0, 3.0], [1.0, 4.0], [0.0, 4.0]],
        ])
        .unwrap();
        let r = steiner(&two, &axis(2, 1)).unwrap();
        assert!((r.volume_after - 2.0).abs() < 1e-14);
        let ring = r.output.ring_2d().unwrap();
        assert_eq!(ring.len(), 4);
        for q in ring {
            assert!((q[0] == 0.0 || q[0] == 1.0) && q[1].abs() == 1.0);
        }
    }

    #[test]
    fn thin_rectangle_keeps_affine_perimeter() {
        let r = steiner(&rectangle(0.0, 0.0, 3.0, 1.0 / 3.0).unwrap(), &axis(2, 0)).unwrap();
        assert!((r.perimeter_after - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!((r.classical_after - r.classical_before).abs() < 1e-12);
        let tilted = vector(&[1.0, 0.3]).normalize();
        let r = steiner(&rectangle(0.0, 0.0, 3.0, 1.0 / 3.0).unwrap(), &tilted).unwrap();
        assert!(r.perimeter_after < r.perimeter_before);
        assert!(r.classical_after < r.classical_before);
    }

    #[test]
    fn cube_along_oblique_direction() {
        let u = vector(&[0.3, -0.5, 0.8]).normalize();
        let r = steiner(&unit_cube(3), &u).unwrap();
        assert!(r.volume_error() < 1e-12, "{}", r.volume_after);
        assert!(r.output.is_convex());
        assert!(r.output.closing_residual() < 1e-12);
        assert!(r.perimeter_after <= r.perimeter_before + 1e-9);
    }

    #[test]
    fn cube_along_axis_is_fixed() {
        let cube = unit_cube(3).translated(&vector(&[-0.5, -0.5, -0.5])).unwrap();
        let r = steiner(&cube, &axis(3, 2)).unwrap();
        assert!(r.volume_error() < 1e-14);
        assert!((r.classical_after - 6.0).abs() < 1e-12);
    }

    #[test]
    fn nearly_parallel_facet_is_perturbed() {
        let u = vector(&[1e-10, 1.0]).normalize();
        let r = steiner(&rectangle(0.0, 0.0, 2.0, 1.0).unwrap(), &u).unwrap();
        let p = r.perturbation.as_ref().unwrap();
        assert!(p.angle <= 1e-6);
        assert!(r.volume_error() < 1e-10);
        assert!(r.perimeter_after <= r.perimeter_before + 1e-9);
    }
}
