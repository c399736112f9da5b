use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::contains_set;
use crate::error::{Error, Result};
use crate::functionals::affine_perimeter;
use crate::geometry::{classical_perimeter, segment_distance, segments_cross, surface_area_measure, winding_number, Polytope};
use crate::symmetrize::clip;

/// Search effort for [`affine_cheeger`].
#[derive(Debug, Clone, PartialEq)]
pub struct CheegerConfig {
    /// Ellipse centres per axis of the bounding box.
    pub centers: usize,
    pub angles: usize,
    pub aspects: Vec<f64>,
    /// Vertices of ellipse polygons and minimum vertex count for local search.
    pub sides: usize,
    pub max_sweeps: usize,
    /// Local search stops once the step falls below this fraction of the
    /// domain diameter.
    pub min_step: f64,
}

impl Default for CheegerConfig {
    fn default() -> Self {
        Self { centers: 5, angles: 6, aspects: vec![1.0, 0.8, 0.6, 0.4, 0.2], sides: 64, max_sweeps: 200, min_step: 1e-5 }
    }
}

/// Best quotient found; an upper bound for the affine q-Cheeger constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheegerResult {
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub q: f64,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub value: f64,
    #[serde(serialize_with = "crate::io::ser_polytope")]
    pub witness: Polytope,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub boundary_contact_distance: f64,
    /// `P(witness) / V(witness)^(1/q)`.
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub classical_value: f64,
    /// Whether `value <= (2/pi) classical_value`.
    pub comparison_ok: bool,
    pub converged: bool,
    /// Best quotient after each local search sweep.
    #[serde(skip)]
    pub trace: Vec<f64>,
}

/// `P_d(D) / V(D)^(1/q)`.
pub fn cheeger_quotient(d: &Polytope, q: f64) -> Result<f64> {
    let v = d.volume();
    if !(v > 0.0) {
        return Err(Error::Degenerate { rank: 1, dim: 2 });
    }
    Ok(affine_perimeter(d)? / v.powf(1.0 / q))
}

fn ring_quotient(ring: &[[f64; 2]], q: f64) -> Option<f64> {
    let p = Polytope::polygon(ring).ok()?;
    cheeger_quotient(&p, q).ok().filter(|v| v.is_finite())
}

fn ellipse_ring(c: [f64; 2], angle: f64, aspect: f64, scale: f64, sides: usize) -> Vec<[f64; 2]> {
    let (ca, sa) = (angle.cos(), angle.sin());
    (0..sides)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / sides as f64;
            let (x, y) = (scale * t.cos(), scale * aspect * t.sin());
            [c[0] + ca * x - sa * y, c[1] + sa * x + ca * y]
        })
        .collect()
}

struct Domain<'a> {
    o: &'a Polytope,
    edges: Vec<([f64; 2], [f64; 2])>,
    diameter: f64,
    eps: f64,
}

impl Domain<'_> {
    fn holds(&self, ring: &[[f64; 2]]) -> bool {
        Polytope::polygon(ring).is_ok_and(|d| contains_set(self.o, &d, self.eps).unwrap_or(false))
    }

    fn inside(&self, p: [f64; 2]) -> bool {
        winding_number(p, &self.edges) != 0 || self.edges.iter().any(|(a, b)| segment_distance(p, *a, *b) <= self.eps)
    }

    fn project(&self, p: [f64; 2]) -> [f64; 2] {
        let mut best = (f64::INFINITY, p);
        for (a, b) in &self.edges {
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
            let x = [a[0] + t * dx, a[1] + t * dy];
            let d = (x[0] - p[0]).hypot(x[1] - p[1]);
            if d < best.0 {
                best = (d, x);
            }
        }
        best.1
    }

    /// Largest scale of the ellipse that stays in the domain.
    fn max_scale(&self, c: [f64; 2], angle: f64, aspect: f64, sides: usize) -> f64 {
        let (mut lo, mut hi) = (0.0, self.diameter);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if self.holds(&ellipse_ring(c, angle, aspect, mid, sides)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// Edges at vertex `i` meet no other edge except at shared vertices.
fn simple_at(ring: &[[f64; 2]], i: usize) -> bool {
    let m = ring.len();
    let edge = |k: usize| (ring[k % m], ring[(k + 1) % m]);
    for e in [(i + m - 1) % m, i] {
        for k in 0..m {
            if k == e || k == (e + 1) % m || (k + 1) % m == e {
                continue;
            }
            if segments_cross(edge(e), edge(k)) {
                return false;
            }
        }
    }
    true
}

fn resample(ring: &[[f64; 2]], min_vertices: usize) -> Vec<[f64; 2]> {
    let m = ring.len();
    let perimeter: f64 = (0..m).map(|k| (ring[(k + 1) % m][0] - ring[k][0]).hypot(ring[(k + 1) % m][1] - ring[k][1])).sum();
    let target = perimeter / min_vertices as f64;
    let mut out = Vec::new();
    for k in 0..m {
        let (a, b) = (ring[k], ring[(k + 1) % m]);
        let pieces = ((b[0] - a[0]).hypot(b[1] - a[1]) / target).ceil().max(1.0) as usize;
        for i in 0..pieces {
            let t = i as f64 / pieces as f64;
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Vertex-wise descent under containment; vertices leaving the domain are
/// projected back onto its boundary.
fn local_search(dom: &Domain, start: Vec<[f64; 2]>, q: f64, config: &CheegerConfig, seed: u64) -> (Vec<[f64; 2]>, f64, bool, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ring = start;
    let mut value = ring_quotient(&ring, q).unwrap_or(f64::INFINITY);
    let mut trace = vec![value];
    let mut step = 0.05 * dom.diameter;
    let mut order: Vec<usize> = (0..ring.len()).collect();
    for _ in 0..config.max_sweeps {
        let before = value;
        order.shuffle(&mut rng);
        for &i in &order {
            let m = ring.len();
            let (prev, next) = (ring[(i + m - 1) % m], ring[(i + 1) % m]);
            let (tx, ty) = (next[0] - prev[0], next[1] - prev[1]);
            let len = tx.hypot(ty);
            if len == 0.0 {
                continue;
            }
            let (tx, ty) = (tx / len, ty / len);
            // ring is counter-clockwise, so the outward normal is (ty, -tx)
            for (dx, dy) in [(ty, -tx), (-ty, tx), (tx, ty), (-tx, -ty)] {
                let old = ring[i];
                let mut p = [old[0] + step * dx, old[1] + step * dy];
                if !dom.inside(p) {
                    p = dom.project(p);
                }
                if p == old {
                    continue;
                }
                ring[i] = p;
                let accepted = simple_at(&ring, i)
                    && dom.holds(&ring)
                    && ring_quotient(&ring, q).is_some_and(|v| {
                        let better = v < value;
                        if better {
                            value = v;
                        }
                        better
                    });
                if accepted {
                    break;
                }
                ring[i] = old;
            }
        }
        trace.push(value);
        if before - value <= 1e-12 * value {
            step *= 0.5;
            if step < config.min_step * dom.diameter {
                return (ring, value, true, trace);
            }
        }
    }
    (ring, value, false, trace)
}

fn counter_clockwise(mut ring: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    if crate::symmetrize::signed_area(&ring) < 0.0 {
        ring.reverse();
    }
    ring
}

/// Upper bound for the affine q-Cheeger constant of a planar domain.
///
/// Stage one scans maximal inscribed ellipses (centre grid, orientation,
/// aspect) and, for convex domains, intersections of the domain with
/// enlarged copies of the best ellipse; the domain itself is always a
/// candidate. Stage two runs vertex descent from the three best candidates.
pub fn affine_cheeger(o: &Polytope, q: f64, config: &CheegerConfig, seed: u64) -> Result<CheegerResult> {
    if o.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: o.dim() });
    }
    if !(1.0..2.0).contains(&q) {
        return Err(Error::Domain(format!("q = {q} outside [1, 2)")));
    }
    if !(o.volume() > 0.0) {
        return Err(Error::Degenerate { rank: 1, dim: 2 });
    }
    let (lo, hi) = o.bounds();
    let diameter = (&hi - &lo).norm();
    let dom = Domain { o, edges: o.edges_2d()?, diameter, eps: 1e-12 * diameter };

    let mut starts: Vec<Vec<[f64; 2]>> = Vec::new();
    if let Ok(ring) = o.ring_2d() {
        starts.push(counter_clockwise(ring));
    }

    let k = config.centers.max(1);
    let mut centers = vec![[o.centroid()[0], o.centroid()[1]]];
    for i in 0..k {
        for j in 0..k {
            let (s, t) = ((i as f64 + 0.5) / k as f64, (j as f64 + 0.5) / k as f64);
            centers.push([lo[0] + s * (hi[0] - lo[0]), lo[1] + t * (hi[1] - lo[1])]);
        }
    }
    centers.retain(|c| winding_number(*c, &dom.edges) != 0);
    let mut params = Vec::new();
    for c in &centers {
        for a in 0..config.angles.max(1) {
            for &r in &config.aspects {
                params.push((*c, std::f64::consts::PI * a as f64 / config.angles.max(1) as f64, r));
            }
        }
    }
    let score = |c: [f64; 2], angle: f64, aspect: f64| {
        let s = dom.max_scale(c, angle, aspect, config.sides);
        let v = if s > 0.0 { ring_quotient(&ellipse_ring(c, angle, aspect, s, config.sides), q) } else { None };
        (v.unwrap_or(f64::INFINITY), s)
    };
    let scored: Vec<(f64, f64)> = params.par_iter().map(|&(c, a, r)| score(c, a, r)).collect();
    if let Some(best) = (0..params.len()).filter(|&i| scored[i].0.is_finite()).min_by(|&a, &b| scored[a].0.total_cmp(&scored[b].0)) {
        // refine centre, angle and aspect by compass search
        let (mut c, mut angle, mut aspect) = params[best];
        let (mut value, mut scale) = scored[best];
        let mut step = 0.1;
        while step > 1e-3 {
            let mut improved = false;
            let moves = [(step, 0.0, 0.0, 0.0), (-step, 0.0, 0.0, 0.0), (0.0, step, 0.0, 0.0), (0.0, -step, 0.0, 0.0), (0.0, 0.0, step, 0.0), (0.0, 0.0, -step, 0.0), (0.0, 0.0, 0.0, step), (0.0, 0.0, 0.0, -step)];
            for (dx, dy, da, dr) in moves {
                let c2 = [c[0] + dx * diameter, c[1] + dy * diameter];
                let r2 = (aspect * (1.0 + dr)).clamp(1e-3, 1.0);
                if winding_number(c2, &dom.edges) == 0 {
                    continue;
                }
                let (v, s) = score(c2, angle + da, r2);
                if v < value {
                    (c, angle, aspect, value, scale) = (c2, angle + da, r2, v, s);
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        let ellipse = ellipse_ring(c, angle, aspect, scale, config.sides);
        starts.push(ellipse);
        if o.is_convex() {
            if let Ok(ring) = o.ring_2d() {
                let ring = counter_clockwise(ring);
                for lambda in [1.05, 1.1, 1.2, 1.35, 1.5, 2.0] {
                    let mut piece = ellipse_ring(c, angle, aspect, lambda * scale, config.sides);
                    for e in 0..ring.len() {
                        piece = clip(&piece, ring[e], ring[(e + 1) % ring.len()], true, dom.eps);
                        if piece.len() < 3 {
                            break;
                        }
                    }
                    if piece.len() >= 3 {
                        starts.push(piece);
                    }
                }
            }
        }
    }

    let mut ranked: Vec<(f64, Vec<[f64; 2]>)> = starts
        .into_iter()
        .map(|r| resample(&r, config.sides))
        .filter(|r| dom.holds(r))
        .filter_map(|r| ring_quotient(&r, q).map(|v| (v, r)))
        .collect();
    if ranked.is_empty() {
        return Err(Error::Config("no candidate set fits inside the domain".into()));
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    ranked.truncate(3);
    let searched: Vec<_> = ranked
        .into_par_iter()
        .enumerate()
        .map(|(i, (_, ring))| local_search(&dom, ring, q, config, seed.wrapping_add(i as u64)))
        .collect();
    let (ring, value, converged, trace) =
        searched.into_iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("at least one candidate");

    let witness = Polytope::polygon(&ring)?;
    let classical_value = classical_perimeter(&surface_area_measure(&witness)?) / witness.volume().powf(1.0 / q);
    let comparison_ok = value <= 2.0 / std::f64::consts::PI * classical_value * (1.0 + 1e-12);
    let mut result = CheegerResult {
        q,
        value,
        witness,
        boundary_contact_distance: 0.0,
        classical_value,
        comparison_ok,
        converged,
        trace,
    };
    result.boundary_contact_distance = boundary_contact(&result, o)?;
    Ok(result)
}

/// Smallest distance between the boundary of the witness and the boundary
/// of the domain.
pub fn boundary_contact(result: &CheegerResult, o: &Polytope) -> Result<f64> {
    let we = result.witness.edges_2d()?;
    let oe = o.edges_2d()?;
    let min_dist = |pts: &[([f64; 2], [f64; 2])], edges: &[([f64; 2], [f64; 2])]| {
        pts.iter()
            .flat_map(|(p, _)| edges.iter().map(move |(a, b)| segment_distance(*p, *a, *b)))
            .fold(f64::INFINITY, f64::min)
    };
    Ok(min_dist(&we, &oe).min(min_dist(&oe, &we)))
}
