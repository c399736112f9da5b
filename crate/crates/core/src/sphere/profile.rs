use crate::error::{Error, Result};
use crate::geometry::SurfaceAreaMeasure;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// One arc of a piecewise-cosine profile: `h(theta) = amplitude cos(theta - phase)`
/// for `theta` in `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl Arc {
    pub fn value(&self, theta: f64) -> f64 {
        self.amplitude * (theta - self.phase).cos()
    }
}

/// Support function of a planar zonotope, in polar angle, as a list of
/// cosine arcs partitioning `[start, start + 2 pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCosineProfile {
    arcs: Vec<Arc>,
    degenerate: bool,
}

impl PiecewiseCosineProfile {
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// True when `h` vanishes somewhere (the zonotope is a segment or a point).
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn value(&self, theta: f64) -> f64 {
        let start = self.arcs[0].start;
        let t = start + (theta - start).rem_euclid(TAU);
        let k = self.arcs.partition_point(|a| a.end <= t).min(self.arcs.len() - 1);
        self.arcs[k].value(t)
    }

    /// Profile of `r h`.
    pub fn scaled(&self, r: f64) -> Self {
        Self {
            arcs: self.arcs.iter().map(|a| Arc { amplitude: a.amplitude * r, ..*a }).collect(),
            degenerate: self.degenerate,
        }
    }
}

/// `h(theta) = 1/2 sum_i w_i |cos(theta - alpha_i)|` for the planar atoms
/// `(cos alpha_i, sin alpha_i; w_i)`, rewritten arc by arc. Arc ends are the
/// angles `alpha_i +- pi/2` where a term changes sign.
pub fn cosine_profile_from_atoms(s: &SurfaceAreaMeasure) -> Result<PiecewiseCosineProfile> {
    if s.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: s.dim() });
    }
    if s.atoms().is_empty() {
        return Err(Error::Domain("empty atom list".into()));
    }
    let atoms: Vec<(f64, f64, f64)> = s
        .atoms()
        .iter()
        .map(|a| (a.direction[1].atan2(a.direction[0]), 0.5 * a.weight * a.direction[0], 0.5 * a.weight * a.direction[1]))
        .collect();

    let mut events: Vec<(f64, usize)> = Vec::with_capacity(2 * atoms.len());
    for (i, &(alpha, _, _)) in atoms.iter().enumerate() {
        events.push(((alpha + FRAC_PI_2).rem_euclid(TAU), i));
        events.push(((alpha - FRAC_PI_2).rem_euclid(TAU), i));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    // group equal angles
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for (angle, i) in events {
        match groups.last_mut() {
            Some((a, members)) if angle - *a <= 1e-15 => members.push(i),
            _ => groups.push((angle, vec![i])),
        }
    }
    if groups.len() > 1 && groups[0].0 + TAU - groups[groups.len() - 1].0 <= 1e-15 {
        let (_, last) = groups.pop().unwrap();
        groups[0].1.extend(last);
    }

    let signs_at = |theta: f64| -> Vec<f64> {
        atoms.iter().map(|&(alpha, _, _)| if (theta - alpha).cos() >= 0.0 { 1.0 } else { -1.0 }).collect()
    };
    let coefficients = |signs: &[f64]| -> (f64, f64) {
        let mut a = 0.0;
        let mut b = 0.0;
        for (s, &(_, c, d)) in signs.iter().zip(&atoms) {
            a += s * c;
            b += s * d;
        }
        (a, b)
    };

    let m = groups.len();
    let bounds = |k: usize| (groups[k].0, if k + 1 < m { groups[k + 1].0 } else { groups[0].0 + TAU });
    // signs are read off at an arc midpoint, which is only reliable on arcs
    // much wider than rounding; start at the widest and refresh on wide ones
    let k0 = (0..m).max_by(|&i, &j| {
        let (wi, wj) = (bounds(i).1 - bounds(i).0, bounds(j).1 - bounds(j).0);
        wi.total_cmp(&wj)
    });
    let k0 = k0.expect("at least one event group");
    let mut arcs = vec![Arc { start: 0.0, end: 0.0, amplitude: 0.0, phase: 0.0 }; m];
    let mut signs: Vec<f64> = Vec::new();
    let (mut a, mut b) = (0.0, 0.0);
    let mut since_refresh = 0;
    for j in 0..m {
        let k = (k0 + j) % m;
        let (start, end) = bounds(k);
        since_refresh += 1;
        if j == 0 || (since_refresh > 256 && end - start > 1e-9) {
            let mid = if m == 1 { start + PI } else { 0.5 * (start + end) };
            signs = signs_at(mid);
            (a, b) = coefficients(&signs);
            since_refresh = 0;
        } else {
            for &i in &groups[k].1 {
                let (_, c, d) = atoms[i];
                a -= 2.0 * signs[i] * c;
                b -= 2.0 * signs[i] * d;
                signs[i] = -signs[i];
            }
        }
        arcs[k] = Arc { start, end, amplitude: a.hypot(b), phase: b.atan2(a) };
    }

    let ends: Vec<f64> = arcs.iter().flat_map(|arc| [arc.value(arc.start), arc.value(arc.end)]).collect();
    let max = ends.iter().cloned().fold(0.0, f64::max).max(arcs.iter().map(|a| a.amplitude).fold(0.0, f64::max));
    let min = ends.iter().cloned().fold(f64::INFINITY, f64::min);
    let degenerate = !(max > 0.0) || min <= 1e-12 * max || arcs.iter().any(|a| a.end - a.start >= PI);
    Ok(PiecewiseCosineProfile { arcs, degenerate })
}

/// `int_0^{2 pi} h(theta)^-2 d theta`, exact.
///
/// On an arc where `h = R cos(theta - phi)` the antiderivative of `h^-2` is
/// `tan(theta - phi) / R^2`, so the arc contributes
/// `sin(b - a) / (h(a) h(b))`.
pub fn exact_2d_negative_square_integral(profile: &PiecewiseCosineProfile) -> Result<f64> {
    if profile.degenerate {
        let min = profile.arcs.iter().map(|a| a.value(a.start).min(a.value(a.end))).fold(f64::INFINITY, f64::min);
        let max = profile.arcs.iter().map(|a| a.amplitude).fold(0.0, f64::max);
        return Err(Error::Divergent { min, max });
    }
    let terms: Vec<f64> =
        profile.arcs.iter().map(|a| (a.end - a.start).sin() / (a.value(a.start) * a.value(a.end))).collect();
    Ok(crate::geometry::pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{vector, Atom};

    fn atoms(list: &[(f64, f64)]) -> SurfaceAreaMeasure {
        SurfaceAreaMeasure::new(
            2,
            list.iter().map(|&(a, w)| Atom { direction: vector(&[a.cos(), a.sin()]), weight: w }).collect(),
        )
        .unwrap()
    }

    fn square_atoms() -> SurfaceAreaMeasure {
        atoms(&[(0.0, 1.0), (FRAC_PI_2, 1.0), (PI, 1.0), (-FRAC_PI_2, 1.0)])
    }

    fn direct(s: &SurfaceAreaMeasure, theta: f64) -> f64 {
        0.5 * s.atoms().iter().map(|a| a.weight * (theta.cos() * a.direction[0] + theta.sin() * a.direction[1]).abs()).sum::<f64>()
    }

    #[test]
    fn square_profile() {
        let p = cosine_profile_from_atoms(&square_atoms()).unwrap();
        assert_eq!(p.arcs().len(), 4);
        assert!((p.value(0.0) - 1.0).abs() < 1e-14);
        assert!((p.value(PI / 4.0) - 2f64.sqrt()).abs() < 1e-14);
        let v = exact_2d_negative_square_integral(&p).unwrap();
        // twice the area of the diamond |x| + |y| <= 1
        assert!((v - 4.0).abs() < 1e-14);
    }

    #[test]
    fn constant_profile_of_fine_polygon() {
        // atoms of a regular N-gon of perimeter 4 give h close to 2/pi * 2 ... compare against direct sum
        let n = 360;
        let list: Vec<(f64, f64)> = (0..n).map(|k| (TAU * k as f64 / n as f64, 4.0 / n as f64)).collect();
        let s = atoms(&list);
        let p = cosine_profile_from_atoms(&s).unwrap();
        for k in 0..720 {
            let t = TAU * k as f64 / 720.0 + 0.001;
            assert!((p.value(t) - direct(&s, t)).abs() < 1e-13);
        }
    }

    #[test]
    fn hexagon_profile_has_six_arcs() {
        let list: Vec<(f64, f64)> = (0..6).map(|k| (PI / 3.0 * k as f64, 1.0)).collect();
        let s = atoms(&list);
        let p = cosine_profile_from_atoms(&s).unwrap();
        assert_eq!(p.arcs().len(), 6);
        for k in 0..360 {
            let t = TAU * k as f64 / 360.0;
            assert!((p.value(t) - direct(&s, t)).abs() < 1e-13);
            assert!((p.value(t) - p.value(t + PI / 3.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn segment_is_degenerate() {
        let p = cosine_profile_from_atoms(&atoms(&[(0.0, 2.0), (PI, 2.0)])).unwrap();
        assert!(p.is_degenerate());
        assert!(matches!(exact_2d_negative_square_integral(&p), Err(Error::Divergent { .. })));
    }

    #[test]
    fn unit_disk_limit() {
        // perimeter-2 pi circle: h = 2, integral = 2 pi / 4
        let n = 4096;
        let list: Vec<(f64, f64)> = (0..n).map(|k| (TAU * k as f64 / n as f64, TAU / n as f64)).collect();
        let p = cosine_profile_from_atoms(&atoms(&list)).unwrap();
        let v = exact_2d_negative_square_integral(&p).unwrap();
        assert!((v - TAU / 4.0).abs() < 1e-5);
    }

    #[test]
    fn homogeneity() {
        let p = cosine_profile_from_atoms(&square_atoms()).unwrap();
        let v = exact_2d_negative_square_integral(&p).unwrap();
        let v3 = exact_2d_negative_square_integral(&p.scaled(3.0)).unwrap();
        assert!((v3 - v / 9.0).abs() < 1e-14);
    }
}
