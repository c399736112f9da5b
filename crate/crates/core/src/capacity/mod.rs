//! Affine BV-capacity.
//!
//! For convex bodies the capacity is the affine perimeter. For general
//! compacta it is an infimum over open supersets, which no finite search
//! exhausts, so it is reported as a bracket: the upper end is the smallest
//! affine perimeter over candidate supersets, the lower end the largest
//! certified lower bound (inscribed convex polygons, or the shadow bound).

mod candidates;
mod properties;
mod shadow;
mod trace;

pub use candidates::{contains_set, dilated_hull, grid_cover, inscribed_polygons, offset_hull, thin_rectangle};
pub use properties::{cross_counterexample, property_suite, CrossReport, PropertyCheck, PropertyReport, Verdict};
pub use shadow::{shadow_length, shadow_lower_bound};
pub use trace::{trace_constants, DiscreteMeasure, TraceConstants};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::functionals::affine_perimeter_with;
use crate::geometry::Polytope;
use crate::io::PolytopeJson;
use crate::sphere::{default_integrator, Integrator};

/// Capacity of a convex body with positive volume: its affine perimeter.
pub fn capacity_convex(k: &Polytope) -> Result<f64> {
    capacity_convex_with(k, default_integrator())
}

pub fn capacity_convex_with(k: &Polytope, integrator: &Integrator) -> Result<f64> {
    if !k.is_convex() {
        return Err(Error::NotConvex);
    }
    if !(k.volume() > 0.0) {
        return Err(Error::Degenerate { rank: k.dim() - 1, dim: k.dim() });
    }
    affine_perimeter_with(k, integrator)
}

/// Which candidate sets a bracket search uses.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateFamily {
    /// Hull dilations by `1 + 10^-k`.
    pub dilation_exponents: Vec<i32>,
    /// Minkowski offsets of the hull by `eps * diameter`.
    pub offsets: Vec<f64>,
    /// Grid covers with cell sides `h * diameter`.
    pub grids: Vec<f64>,
    /// Thin rectangles around planar sets of zero area, by width.
    pub thin_widths: Vec<f64>,
    /// Union of dilated hulls of the connected components.
    pub components: bool,
    /// Coordinate-descent passes over polygonal supersets.
    pub search_passes: usize,
    /// Cap on inscribed polygons tried for the lower bound.
    pub inscribed_limit: usize,
    /// Use the shadow lower bound (plane only).
    pub shadow: bool,
}

impl Default for CandidateFamily {
    fn default() -> Self {
        Self {
            dilation_exponents: vec![3, 6, 9],
            offsets: vec![1e-2, 1e-4, 1e-6],
            grids: vec![1.0 / 8.0, 1.0 / 32.0, 1.0 / 128.0],
            thin_widths: vec![1e-1, 1e-2, 1e-3, 1e-4],
            components: true,
            search_passes: 4,
            inscribed_limit: 256,
            shadow: true,
        }
    }
}

impl CandidateFamily {
    pub fn is_empty(&self) -> bool {
        self.dilation_exponents.is_empty()
            && self.offsets.is_empty()
            && self.grids.is_empty()
            && self.thin_widths.is_empty()
            && !self.components
            && self.search_passes == 0
    }

    /// Only one kind of superset: `grid`, `offset` or `search` (search starts
    /// from the hull dilations).
    pub fn only(kind: &str) -> Result<Self> {
        let d = Self::default();
        let none = Self {
            dilation_exponents: Vec::new(),
            offsets: Vec::new(),
            grids: Vec::new(),
            thin_widths: Vec::new(),
            components: false,
            search_passes: 0,
            ..d.clone()
        };
        match kind {
            "grid" => Ok(Self { grids: d.grids, ..none }),
            "offset" => Ok(Self { offsets: d.offsets, thin_widths: d.thin_widths, ..none }),
            "search" => Ok(Self { dilation_exponents: d.dilation_exponents, components: true, search_passes: d.search_passes, ..none }),
            other => Err(Error::Config(format!("unknown candidate family \"{other}\" (grid, offset, search)"))),
        }
    }
}

/// Where a bound comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    Exact,
    Dilation,
    Offset,
    Grid,
    ThinRectangle,
    Components,
    Search,
    Inscribed,
    Shadow,
    Trivial,
}

/// `lower <= C(K) <= upper` with the sets that certify each end.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityBracket {
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub lower: f64,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub upper: f64,
    pub exact: bool,
    pub lower_source: BoundSource,
    pub upper_source: BoundSource,
    #[serde(serialize_with = "polytope_opt")]
    pub lower_witness: Option<Polytope>,
    #[serde(serialize_with = "polytope_opt")]
    pub upper_witness: Option<Polytope>,
}

fn polytope_opt<S: Serializer>(p: &Option<Polytope>, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.as_ref().map(PolytopeJson::from_polytope).serialize(s)
}

impl CapacityBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

pub fn capacity_bracket(k: &Polytope, family: &CandidateFamily) -> Result<CapacityBracket> {
    capacity_bracket_with(k, family, default_integrator())
}

/// Certified bracket for the capacity of a compact polyhedral set.
///
/// Convex bodies with positive volume collapse to the exact value. Otherwise
/// every candidate superset is checked for containment before its affine
/// perimeter counts, and every inscribed candidate before its capacity
/// counts.
pub fn capacity_bracket_with(k: &Polytope, family: &CandidateFamily, integrator: &Integrator) -> Result<CapacityBracket> {
    if family.is_empty() {
        return Err(Error::Config("empty candidate family".into()));
    }
    if k.is_convex() && k.volume() > 0.0 {
        let c = capacity_convex_with(k, integrator)?;
        return Ok(CapacityBracket {
            lower: c,
            upper: c,
            exact: true,
            lower_source: BoundSource::Exact,
            upper_source: BoundSource::Exact,
            lower_witness: Some(k.clone()),
            upper_witness: Some(k.clone()),
        });
    }
    let (upper, upper_source, upper_witness) = upper_bound(k, family, integrator)?;
    let (lower, lower_source, lower_witness) = lower_bound(k, family, integrator)?;
    Ok(CapacityBracket { lower, upper, exact: false, lower_source, upper_source, lower_witness, upper_witness })
}

type Bound = (f64, BoundSource, Option<Polytope>);

fn diameter(k: &Polytope) -> f64 {
    let (lo, hi) = k.bounds();
    (hi - lo).norm()
}

fn upper_bound(k: &Polytope, family: &CandidateFamily, integrator: &Integrator) -> Result<Bound> {
    let diam = diameter(k);
    let mut candidates: Vec<(BoundSource, Polytope)> = Vec::new();
    let hull_ok = candidates::hull_of(k).is_ok_and(|h| h.volume() > 0.0);
    if hull_ok {
        for &e in &family.dilation_exponents {
            candidates.push((BoundSource::Dilation, dilated_hull(k, 1.0 + 10f64.powi(-e))?));
        }
    }
    if k.dim() == 2 {
        for &eps in &family.offsets {
            candidates.push((BoundSource::Offset, offset_hull(k, eps * diam, 16)?));
        }
        if k.volume() <= 0.0 && k.vertices().len() == 2 {
            let (a, b) = (&k.vertices()[0], &k.vertices()[1]);
            for &w in &family.thin_widths {
                candidates.push((BoundSource::ThinRectangle, thin_rectangle([a[0], a[1]], [b[0], b[1]], w)?));
            }
        }
        for &h in &family.grids {
            if let Some(g) = grid_cover(k, h * diam, 1 << 18)? {
                candidates.push((BoundSource::Grid, g));
            }
        }
        if family.components {
            if let Some(c) = component_hulls(k)? {
                candidates.push((BoundSource::Components, c));
            }
        }
    }
    let eps = 1e-9 * diam.max(f64::MIN_POSITIVE);
    let scored: Vec<Option<(f64, BoundSource, Polytope)>> = candidates
        .into_par_iter()
        .map(|(src, c)| {
            let inside = if k.dim() == 2 { contains_set(&c, k, eps).unwrap_or(false) } else { src == BoundSource::Dilation };
            if !inside {
                return None;
            }
            affine_perimeter_with(&c, integrator).ok().map(|p| (p, src, c))
        })
        .collect();
    let mut best: Option<(f64, BoundSource, Polytope)> = None;
    for s in scored.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| s.0 < b.0) {
            best = Some(s);
        }
    }
    if k.dim() == 2 && family.search_passes > 0 {
        if let Some((p, _, start)) = best.clone() {
            if let Some((q, poly)) = local_search(k, &start, p, family.search_passes, eps)? {
                if q < p {
                    best = Some((q, BoundSource::Search, poly));
                }
            }
        }
    }
    match best {
        Some((p, src, w)) => Ok((p, src, Some(w))),
        None => Ok((f64::INFINITY, BoundSource::Trivial, None)),
    }
}

fn lower_bound(k: &Polytope, family: &CandidateFamily, integrator: &Integrator) -> Result<Bound> {
    let mut best: Bound = (0.0, BoundSource::Trivial, None);
    if k.dim() != 2 {
        return Ok(best);
    }
    if family.inscribed_limit > 0 {
        for p in inscribed_polygons(k, family.inscribed_limit)? {
            let c = capacity_convex_with(&p, integrator)?;
            if c > best.0 {
                best = (c, BoundSource::Inscribed, Some(p));
            }
        }
    }
    if family.shadow {
        let s = shadow_lower_bound(k)?;
        if s > best.0 {
            best = (s, BoundSource::Shadow, None);
        }
    }
    Ok(best)
}

/// Dilated hulls of the boundary loops (connected pieces without holes),
/// merged while they overlap.
fn component_hulls(k: &Polytope) -> Result<Option<Polytope>> {
    let edges = k.edges_2d()?;
    // group vertices by loop through the edge graph
    let n = k.vertices().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for f in k.facets() {
        let (a, b) = (find(&mut parent, f.vertices[0]), find(&mut parent, f.vertices[1]));
        parent[a] = b;
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<[f64; 2]>> = std::collections::BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push([k.vertices()[i][0], k.vertices()[i][1]]);
    }
    if groups.len() < 2 || edges.is_empty() {
        return Ok(None);
    }
    let mut pieces: Vec<Vec<[f64; 2]>> = groups.into_values().collect();
    let diam = diameter(k);
    loop {
        let hulls: Vec<Polytope> =
            pieces.iter().map(|p| dilated_point_hull(p, 1e-6 * diam)).collect::<Result<_>>()?;
        let mut merged = false;
        'pairs: for i in 0..hulls.len() {
            for j in 0..i {
                if convex_overlap(&hulls[i], &hulls[j]) {
                    let moved = pieces.remove(i);
                    pieces[j].extend(moved);
                    merged = true;
                    break 'pairs;
                }
            }
        }
        if !merged {
            let rings: Vec<Vec<[f64; 2]>> = hulls.iter().map(|h| h.ring_2d()).collect::<Result<_>>()?;
            return Polytope::from_rings(&rings).map(Some);
        }
    }
}

fn dilated_point_hull(points: &[[f64; 2]], eps: f64) -> Result<Polytope> {
    let mut pts = Vec::with_capacity(points.len() * 8);
    for p in points {
        for j in 0..8 {
            let a = std::f64::consts::TAU * (j as f64 + 0.5) / 8.0;
            let r = eps / (std::f64::consts::PI / 8.0).cos();
            pts.push([p[0] + r * a.cos(), p[1] + r * a.sin()]);
        }
    }
    Polytope::convex_polygon(&pts)
}

/// Separating-axis test for convex polygons (touching counts as overlap).
fn convex_overlap(a: &Polytope, b: &Polytope) -> bool {
    for f in a.facets().iter().chain(b.facets()) {
        let (amin, amax) = project(a, &f.normal);
        let (bmin, bmax) = project(b, &f.normal);
        if amax < bmin || bmax < amin {
            return false;
        }
    }
    true
}

fn project(p: &Polytope, n: &crate::geometry::Vector) -> (f64, f64) {
    p.vertices().iter().map(|v| n.dot(v)).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

/// Coordinate descent on the vertices of a polygonal superset: a move is
/// kept when the set still contains `k` and its affine perimeter drops.
fn local_search(k: &Polytope, start: &Polytope, value: f64, passes: usize, eps: f64) -> Result<Option<(f64, Polytope)>> {
    let Ok(rings) = split_rings(start) else { return Ok(None) };
    let mut rings = rings;
    let mut best = value;
    let mut step = 0.05 * diameter(start);
    for _ in 0..passes {
        let mut improved = false;
        for r in 0..rings.len() {
            for v in 0..rings[r].len() {
                for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
                    let old = rings[r][v];
                    rings[r][v] = [old[0] + dx * step, old[1] + dy * step];
                    let accepted = Polytope::from_rings(&rings).ok().and_then(|c| {
                        if !contains_set(&c, k, eps).unwrap_or(false) {
                            return None;
                        }
                        crate::functionals::affine_perimeter(&c).ok().filter(|&p| p < best)
                    });
                    match accepted {
                        Some(p) => {
                            best = p;
                            improved = true;
                        }
                        None => rings[r][v] = old,
                    }
                }
            }
        }
        if !improved {
            step *= 0.25;
        }
    }
    if best < value {
        return Ok(Some((best, Polytope::from_rings(&rings)?)));
    }
    Ok(None)
}

fn split_rings(p: &Polytope) -> Result<Vec<Vec<[f64; 2]>>> {
    let mut next = std::collections::HashMap::new();
    for f in p.facets() {
        if next.insert(f.vertices[0], f.vertices[1]).is_some() {
            return Err(Error::InvalidPolytope("vertex with several outgoing edges".into()));
        }
    }
    let mut seen = vec![false; p.vertices().len()];
    let mut rings = Vec::new();
    for f in p.facets() {
        let start = f.vertices[0];
        if seen[start] {
            continue;
        }
        let mut ring = Vec::new();
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            ring.push([p.vertices()[cur][0], p.vertices()[cur][1]]);
            cur = next[&cur];
        }
        rings.push(ring);
    }
    Ok(rings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{affine_perimeter, ball, BallFineness};
    use crate::geometry::shapes::{diamond, rectangle};
    use crate::geometry::vector;
    use std::f64::consts::PI;

    #[test]
    fn convex_capacity_values() {
        let disk = ball(2, 1.0, BallFineness { polygon_log2: 14, icosphere_level: 0 }).unwrap();
        assert!((capacity_convex(&disk).unwrap() - 4.0).abs() < 4e-6);
        let r = rectangle(0.0, 0.0, 1000.0, 10.0).unwrap();
        assert!((capacity_convex(&r).unwrap() - 100.0 * (2.0 * PI).sqrt()).abs() < 1e-10);
        let l = Polytope::polygon(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        assert_eq!(capacity_convex(&l), Err(Error::NotConvex));
    }

    #[test]
    fn convex_bracket_collapses() {
        let b = capacity_bracket(&diamond(1.0).unwrap(), &CandidateFamily::default()).unwrap();
        assert!(b.exact);
        assert_eq!(b.lower, b.upper);
    }

    #[test]
    fn two_diamonds() {
        let d = diamond(1.0).unwrap();
        let shifted = d.translated(&vector(&[3.0, 0.0])).unwrap();
        let rings = vec![d.ring_2d().unwrap(), shifted.ring_2d().unwrap()];
        let k = Polytope::from_rings(&rings).unwrap();
        let b = capacity_bracket(&k, &CandidateFamily::default()).unwrap();
        let single = affine_perimeter(&d).unwrap();
        let mut all = rings[0].clone();
        all.extend(rings[1].iter().cloned());
        let hull = affine_perimeter(&Polytope::convex_polygon(&all).unwrap()).unwrap();
        assert!(b.lower >= single - 1e-12);
        assert!(b.upper <= hull + 1e-6);
        assert!(b.lower <= b.upper + 1e-9, "{} {}", b.lower, b.upper);
    }

    #[test]
    fn segment_bracket() {
        let seg = Polytope::segment([-1.0, 0.0], [1.0, 0.0]).unwrap();
        let thin = CandidateFamily { thin_widths: vec![1e-2, 1e-4], ..CandidateFamily::only("grid").unwrap() };
        let thin = CandidateFamily { grids: vec![], ..thin };
        let b = capacity_bracket(&seg, &thin).unwrap();
        assert_eq!(b.lower, 0.0);
        assert_eq!(b.upper_source, BoundSource::ThinRectangle);
        let expected = (2.0 * PI * (2.0 + 1e-4) * 1e-4).sqrt();
        assert!((b.upper - expected).abs() < 1e-9, "{}", b.upper);
        let all = capacity_bracket(&seg, &CandidateFamily::default()).unwrap();
        assert!(all.upper < b.upper);
    }

    #[test]
    fn empty_family_is_rejected() {
        let f = CandidateFamily { dilation_exponents: vec![], offsets: vec![], grids: vec![], thin_widths: vec![], components: false, search_passes: 0, ..Default::default() };
        let l = Polytope::polygon(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        assert!(matches!(capacity_bracket(&l, &f), Err(Error::Config(_))));
    }
}
