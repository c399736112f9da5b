//! Lower bound from shadows: every open set containing `K` has a projection
//! body at least as wide as the shadow of `K`.

use crate::error::Result;
use crate::functionals::omega_n;
use crate::geometry::Polytope;

/// Length of the shadow of the planar set (union of its projected edges) on
/// the line spanned by `w`.
pub fn shadow_length(edges: &[([f64; 2], [f64; 2])], w: [f64; 2]) -> f64 {
    let mut iv: Vec<(f64, f64)> = edges
        .iter()
        .map(|(a, b)| {
            let (p, q) = (w[0] * a[0] + w[1] * a[1], w[0] * b[0] + w[1] * b[1]);
            (p.min(q), p.max(q))
        })
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (lo, hi) in iv {
        match cur {
            Some((cl, ch)) if lo <= ch => cur = Some((cl, ch.max(hi))),
            Some((cl, ch)) => {
                total += ch - cl;
                cur = Some((lo, hi));
            }
            None => cur = Some((lo, hi)),
        }
    }
    if let Some((cl, ch)) = cur {
        total += ch - cl;
    }
    total
}

/// `(4 pi / V)^(1/2)` with `V = (1/2) int s(theta)^-2 d theta`, where
/// `s(theta)` is the shadow length of `K` orthogonal to `(cos, sin)`.
///
/// Between consecutive angles at which two vertices project to the same
/// point the union of shadow intervals keeps its combinatorics, so `s` is a
/// single cosine there and integrates in closed form. Zero if some shadow
/// vanishes.
pub fn shadow_lower_bound(k: &Polytope) -> Result<f64> {
    let edges = k.edges_2d()?;
    let pts: Vec<[f64; 2]> = k.vertices().iter().map(|v| [v[0], v[1]]).collect();
    let mut angles = vec![0.0, std::f64::consts::PI];
    for i in 0..pts.len() {
        for j in 0..i {
            let (dx, dy) = (pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
            if dx == 0.0 && dy == 0.0 {
                continue;
            }
            // w(theta) = (-sin, cos) is orthogonal to (dx, dy) at theta = atan2(dy, dx)
            angles.push(dy.atan2(dx).rem_euclid(std::f64::consts::PI));
        }
    }
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
    let s = |t: f64| shadow_length(&edges, [-t.sin(), t.cos()]);
    let mut integral = 0.0;
    for w in angles.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 1e-15 {
            continue;
        }
        // fit s = alpha cos + beta sin from two interior samples
        let (t1, t2) = (a + (b - a) / 3.0, a + 2.0 * (b - a) / 3.0);
        let (s1, s2) = (s(t1), s(t2));
        let det = (t2 - t1).sin();
        let alpha = (s1 * t2.sin() - s2 * t1.sin()) / det;
        let beta = (s2 * t1.cos() - s1 * t2.cos()) / det;
        let (sa, sb) = (alpha * a.cos() + beta * a.sin(), alpha * b.cos() + beta * b.sin());
        if !(sa > 0.0 && sb > 0.0) {
            return Ok(0.0);
        }
        integral += (b - a).sin() / (sa * sb);
    }
    // s has period pi, so the half-circle integral is (1/2) int_0^{2 pi} s^-2
    Ok((4.0 * omega_n(2) / integral).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::affine_perimeter;
    use crate::geometry::shapes::{diamond, rectangle, unit_square};
    use std::f64::consts::PI;

    #[test]
    fn convex_sets_give_their_affine_perimeter() {
        let l = shadow_lower_bound(&unit_square()).unwrap();
        assert!((l - (2.0 * PI).sqrt()).abs() < 1e-12);
        let d = diamond(3.0).unwrap();
        assert!((shadow_lower_bound(&d).unwrap() - affine_perimeter(&d).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn segment_gives_zero() {
        let seg = Polytope::segment([-1.0, 0.0], [1.0, 0.0]).unwrap();
        assert_eq!(shadow_lower_bound(&seg).unwrap(), 0.0);
    }

    #[test]
    fn connected_sets_give_their_hull() {
        let l = Polytope::polygon(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        let hull = Polytope::convex_polygon(&l.ring_2d().unwrap()).unwrap();
        assert!((shadow_lower_bound(&l).unwrap() - affine_perimeter(&hull).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn disjoint_squares_beat_one_square() {
        let two = Polytope::from_rings(&[
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[5.0, 0.0], [6.0, 0.0], [6.0, 1.0], [5.0, 1.0]],
        ])
        .unwrap();
        let b = shadow_lower_bound(&two).unwrap();
        assert!(b > (2.0 * PI).sqrt());
        let hull = rectangle(0.0, 0.0, 6.0, 1.0).unwrap();
        assert!(b < affine_perimeter(&hull).unwrap());
    }
}
