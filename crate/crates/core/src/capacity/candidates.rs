//! Polygonal supersets (upper bounds) and inscribed convex polygons (lower
//! bounds) of planar compacta.

use crate::error::Result;
use crate::geometry::{convex_hull, Polytope, Vector};

type Edge = ([f64; 2], [f64; 2]);

fn proper_crossing(p: Edge, q: Edge, eps: f64) -> bool {
    let d = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let lp = (p.1[0] - p.0[0]).hypot(p.1[1] - p.0[1]);
    let lq = (q.1[0] - q.0[0]).hypot(q.1[1] - q.0[1]);
    let (d1, d2) = (d(p.0, p.1, q.0) / lp, d(p.0, p.1, q.1) / lp);
    let (d3, d4) = (d(q.0, q.1, p.0) / lq, d(q.0, q.1, p.1) / lq);
    ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
}

fn strictly_inside(p: [f64; 2], edges: &[Edge], eps: f64) -> bool {
    use crate::geometry::{segment_distance, winding_number};
    winding_number(p, edges) != 0 && edges.iter().all(|(a, b)| segment_distance(p, *a, *b) > eps)
}

fn inside_or_on(p: [f64; 2], edges: &[Edge], eps: f64) -> bool {
    use crate::geometry::{segment_distance, winding_number};
    winding_number(p, edges) != 0 || edges.iter().any(|(a, b)| segment_distance(p, *a, *b) <= eps)
}

/// Whether the closed planar set `inner` lies in the closed planar set
/// `outer`, both bounded by polygon loops.
pub fn contains_set(outer: &Polytope, inner: &Polytope, eps: f64) -> Result<bool> {
    let oe = outer.edges_2d()?;
    let ie = inner.edges_2d()?;
    let mid = |e: &Edge| [0.5 * (e.0[0] + e.1[0]), 0.5 * (e.0[1] + e.1[1])];
    if !ie.iter().all(|e| inside_or_on(e.0, &oe, eps) && inside_or_on(mid(e), &oe, eps)) {
        return Ok(false);
    }
    if ie.iter().any(|p| oe.iter().any(|q| proper_crossing(*p, *q, eps))) {
        return Ok(false);
    }
    if inner.volume() > 0.0 && oe.iter().any(|e| strictly_inside(e.0, &ie, eps) || strictly_inside(mid(e), &ie, eps)) {
        return Ok(false);
    }
    Ok(true)
}

pub(crate) fn ring_points(k: &Polytope) -> Vec<[f64; 2]> {
    k.vertices().iter().map(|v| [v[0], v[1]]).collect()
}

/// Convex hull of `k` dilated by `factor` about its vertex centroid.
pub fn dilated_hull(k: &Polytope, factor: f64) -> Result<Polytope> {
    let hull = hull_of(k)?;
    hull.scaled_about(factor, &hull.vertex_centroid())
}

pub(crate) fn hull_of(k: &Polytope) -> Result<Polytope> {
    if k.dim() == 2 {
        Polytope::convex_polygon(&ring_points(k))
    } else {
        convex_hull(k.vertices())
    }
}

/// Minkowski sum of the convex hull with a regular `sides`-gon
/// circumscribing the disk of radius `eps`; contains the eps-offset.
pub fn offset_hull(k: &Polytope, eps: f64, sides: usize) -> Result<Polytope> {
    let r = eps / (std::f64::consts::PI / sides as f64).cos();
    let hull = ring_points(k);
    let mut pts = Vec::with_capacity(hull.len() * sides);
    for p in &hull {
        for j in 0..sides {
            let a = std::f64::consts::TAU * (j as f64 + 0.5) / sides as f64;
            pts.push([p[0] + r * a.cos(), p[1] + r * a.sin()]);
        }
    }
    Polytope::convex_polygon(&pts)
}

/// Rectangle `[x0 - pad, x1 + pad] x [-width/2, width/2]` around a segment on
/// the first axis, rotated into place for general segments.
pub fn thin_rectangle(a: [f64; 2], b: [f64; 2], width: f64) -> Result<Polytope> {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len = dx.hypot(dy);
    let (ux, uy) = (dx / len, dy / len);
    let (nx, ny) = (-uy * 0.5 * width, ux * 0.5 * width);
    let pad = 0.5 * width;
    let (a, b) = ([a[0] - pad * ux, a[1] - pad * uy], [b[0] + pad * ux, b[1] + pad * uy]);
    Polytope::polygon(&[[a[0] - nx, a[1] - ny], [b[0] - nx, b[1] - ny], [b[0] + nx, b[1] + ny], [a[0] + nx, a[1] + ny]])
}

/// Union of the closed grid cells of side `h` that meet `k` (slightly
/// enlarged), returned as a polygonal set. `None` when the cover would need
/// more than `max_cells` cells.
pub fn grid_cover(k: &Polytope, h: f64, max_cells: usize) -> Result<Option<Polytope>> {
    let (lo, hi) = k.bounds();
    let slack = 1e-9 * h;
    let i0 = ((lo[0] - slack) / h).floor() as i64;
    let j0 = ((lo[1] - slack) / h).floor() as i64;
    let i1 = ((hi[0] + slack) / h).ceil() as i64;
    let j1 = ((hi[1] + slack) / h).ceil() as i64;
    let (nx, ny) = ((i1 - i0) as usize, (j1 - j0) as usize);
    if nx.saturating_mul(ny) > max_cells {
        return Ok(None);
    }
    let edges = k.edges_2d()?;
    let mut on = vec![false; nx * ny];
    for (a, b) in &edges {
        // walk the segment finely enough to touch every cell it crosses
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let steps = (4.0 * len / h).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            for ox in [-slack, slack] {
                for oy in [-slack, slack] {
                    let i = (((p[0] + ox) / h).floor() as i64 - i0).clamp(0, nx as i64 - 1) as usize;
                    let j = (((p[1] + oy) / h).floor() as i64 - j0).clamp(0, ny as i64 - 1) as usize;
                    on[j * nx + i] = true;
                }
            }
        }
    }
    // cells whose centre lies inside
    for j in 0..ny {
        for i in 0..nx {
            let c = [(i0 + i as i64) as f64 * h + 0.5 * h, (j0 + j as i64) as f64 * h + 0.5 * h];
            if crate::geometry::winding_number(c, &edges) != 0 {
                on[j * nx + i] = true;
            }
        }
    }
    // sampled walk can miss a cell only at an exact corner pass; close that gap
    let mut cover = on.clone();
    for j in 0..ny {
        for i in 0..nx {
            if on[j * nx + i] {
                continue;
            }
            let x0 = (i0 + i as i64) as f64 * h;
            let y0 = (j0 + j as i64) as f64 * h;
            let cell = [[x0, y0], [x0 + h, y0], [x0 + h, y0 + h], [x0, y0 + h]];
            let hit = (0..4).any(|m| {
                let e = (cell[m], cell[(m + 1) % 4]);
                edges.iter().any(|q| proper_crossing(e, *q, 0.0))
            });
            cover[j * nx + i] = hit;
        }
    }
    Ok(Some(cells_to_polytope(&cover, nx, ny, i0, j0, h)?))
}

fn cells_to_polytope(on: &[bool], nx: usize, ny: usize, i0: i64, j0: i64, h: f64) -> Result<Polytope> {
    use crate::geometry::{vector, Facet};
    let filled = |i: i64, j: i64| i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny && on[j as usize * nx + i as usize];
    let mut index = std::collections::HashMap::new();
    let mut vertices = Vec::new();
    let mut id = |i: i64, j: i64, vertices: &mut Vec<Vector>| {
        *index.entry((i, j)).or_insert_with(|| {
            vertices.push(vector(&[(i0 + i) as f64 * h, (j0 + j) as f64 * h]));
            vertices.len() - 1
        })
    };
    let mut facets = Vec::new();
    for j in 0..ny as i64 {
        for i in 0..nx as i64 {
            if !filled(i, j) {
                continue;
            }
            // counter-clockwise boundary edges of the cell that face empty cells
            let sides = [
                ((i, j), (i + 1, j), (0.0, -1.0), (i, j - 1)),
                ((i + 1, j), (i + 1, j + 1), (1.0, 0.0), (i + 1, j)),
                ((i + 1, j + 1), (i, j + 1), (0.0, 1.0), (i, j + 1)),
                ((i, j + 1), (i, j), (-1.0, 0.0), (i - 1, j)),
            ];
            for (a, b, n, nb) in sides {
                if filled(nb.0, nb.1) {
                    continue;
                }
                let ia = id(a.0, a.1, &mut vertices);
                let ib = id(b.0, b.1, &mut vertices);
                let normal = vector(&[n.0, n.1]);
                let offset = normal.dot(&vertices[ia]);
                facets.push(Facet { normal, measure: h, offset, vertices: vec![ia, ib] });
            }
        }
    }
    Polytope::from_facets(2, vertices, facets)
}

/// Convex polygons spanned by vertex subsets of `k` and contained in it:
/// every contained triangle grown greedily by further vertices.
pub fn inscribed_polygons(k: &Polytope, limit: usize) -> Result<Vec<Polytope>> {
    let pts = ring_points(k);
    let eps = 1e-9 * k.radius().max(1.0);
    let mut out: Vec<Polytope> = Vec::new();
    let n = pts.len();
    'outer: for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let Ok(tri) = Polytope::convex_polygon(&[pts[a], pts[b], pts[c]]) else { continue };
                if tri.volume() <= eps * eps || !contains_set(k, &tri, eps)? {
                    continue;
                }
                let mut chosen = vec![pts[a], pts[b], pts[c]];
                let mut current = tri;
                for (m, p) in pts.iter().enumerate() {
                    if m == a || m == b || m == c {
                        continue;
                    }
                    chosen.push(*p);
                    match Polytope::convex_polygon(&chosen) {
                        Ok(bigger) if contains_set(k, &bigger, eps)? => current = bigger,
                        _ => {
                            chosen.pop();
                        }
                    }
                }
                out.push(current);
                if out.len() >= limit {
                    break 'outer;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::affine_perimeter;
    use crate::geometry::shapes::{rectangle, unit_square};

    fn l_shape() -> Polytope {
        Polytope::polygon(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap()
    }

    #[test]
    fn containment() {
        let l = l_shape();
        assert!(contains_set(&l, &unit_square(), 1e-12).unwrap());
        assert!(contains_set(&l, &rectangle(0.0, 0.0, 2.0, 1.0).unwrap(), 1e-12).unwrap());
        assert!(!contains_set(&l, &rectangle(0.0, 0.0, 2.0, 2.0).unwrap(), 1e-12).unwrap());
        // the diagonal chord of the square cuts off a corner
        let tri = Polytope::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(!contains_set(&tri, &unit_square(), 1e-12).unwrap());
    }

    #[test]
    fn grid_cover_contains_the_set() {
        let l = l_shape();
        for h in [0.5, 0.3, 0.07] {
            let g = grid_cover(&l, h, 1 << 20).unwrap().unwrap();
            assert!(contains_set(&g, &l, 1e-9).unwrap(), "{h}");
            assert!(g.volume() >= l.volume());
        }
    }

    #[test]
    fn offsets_and_dilations_shrink_to_the_hull() {
        let l = l_shape();
        let hull = hull_of(&l).unwrap();
        let p = affine_perimeter(&hull).unwrap();
        let o = offset_hull(&l, 1e-6, 16).unwrap();
        assert!(contains_set(&o, &l, 0.0).unwrap());
        assert!((affine_perimeter(&o).unwrap() - p).abs() < 1e-5);
        let d = dilated_hull(&l, 1.0 + 1e-9).unwrap();
        assert!((affine_perimeter(&d).unwrap() - p).abs() < 1e-8);
    }

    #[test]
    fn inscribed_polygons_of_l() {
        let found = inscribed_polygons(&l_shape(), 64).unwrap();
        assert!(!found.is_empty());
        let best = found.iter().map(|p| p.volume()).fold(0.0, f64::max);
        assert!((best - 2.0).abs() < 1e-12);
    }
}
