use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::partition::Frame;
use super::steiner::{steiner_with, SteinerResult};
use crate::error::Result;
use crate::functionals::{affine_perimeter_with, inequality_report_with, projection_body, rounding, BallFineness, ProjectionBody};
use crate::geometry::{surface_area_measure, Polytope, Vector};
use crate::io::polytope_to_json;
use crate::sphere::Integrator;

/// Outcome of one symmetrization with the inequalities it must satisfy.
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub result: SteinerResult,
    pub tolerance: f64,
    pub affine_ok: bool,
    pub classical_ok: bool,
    pub volume_ok: bool,
    /// Capacities before and after; these are the affine perimeters when the
    /// input is convex (the symmetral is then convex too).
    pub capacity: Option<(f64, f64)>,
    /// Input set and direction as JSON when a check failed.
    pub counterexample: Option<String>,
}

impl MonotonicityReport {
    pub fn pass(&self) -> bool {
        self.affine_ok && self.classical_ok && self.volume_ok
    }
}

/// Symmetrizes `e` along `u` and checks that neither perimeter grows (up to
/// `tol`) and that volume is kept to `1e-10` relative.
pub fn verify_monotonicity(e: &Polytope, u: &Vector, integrator: &Integrator, tol: f64) -> Result<MonotonicityReport> {
    let result = steiner_with(e, u, integrator)?;
    let affine_ok = result.perimeter_after <= result.perimeter_before + tol;
    let classical_ok = result.classical_after <= result.classical_before * (1.0 + 1e-12) + tol;
    let volume_ok = result.volume_error() <= 1e-10;
    let capacity = e.is_convex().then_some((result.perimeter_before, result.perimeter_after));
    let counterexample = (!(affine_ok && classical_ok && volume_ok)).then(|| {
        format!(
            "{{\"direction\": {:?}, \"set\": {}}}",
            u.iter().cloned().collect::<Vec<f64>>(),
            polytope_to_json(e)
        )
    });
    Ok(MonotonicityReport { result, tolerance: tol, affine_ok, classical_ok, volume_ok, capacity, counterexample })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundingReport {
    pub perimeter: f64,
    pub rounded_perimeter: f64,
    pub radius: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares the affine perimeter of `e` with that of its rounding (a
/// polytopal ball of the same volume).
pub fn verify_rounding(e: &Polytope, fineness: BallFineness, integrator: &Integrator, tol: f64) -> Result<RoundingReport> {
    let ball = rounding(e, fineness)?;
    let perimeter = affine_perimeter_with(e, integrator)?;
    let rounded_perimeter = affine_perimeter_with(&ball, integrator)?;
    Ok(RoundingReport {
        perimeter,
        rounded_perimeter,
        radius: crate::functionals::rounding_radius(e)?,
        tolerance: tol,
        pass: rounded_perimeter <= perimeter + tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub affine_perimeter: f64,
    pub perimeter: f64,
    pub petty_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct SymmetrizationTrace {
    pub rows: Vec<TraceRow>,
    /// Whether the affine perimeter never grew by more than the tolerance.
    pub monotone: bool,
    pub last: Polytope,
}

impl SymmetrizationTrace {
    pub const CSV_HEADER: &'static str = "step,P_BVd,P_BV,petty_ratio";

    pub fn to_csv(&self) -> String {
        use crate::io::fmt_sig;
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.step, fmt_sig(r.affine_perimeter), fmt_sig(r.perimeter), fmt_sig(r.petty_ratio)));
        }
        s
    }
}

/// Symmetrizes repeatedly, cycling through `directions`, and records the
/// affine perimeter, classical perimeter and Petty ratio after every step.
pub fn iterate_symmetrization(
    e: &Polytope,
    directions: &[Vector],
    max_steps: usize,
    integrator: &Integrator,
    tol: f64,
) -> Result<SymmetrizationTrace> {
    let row = |step: usize, p: &Polytope| -> Result<TraceRow> {
        let r = inequality_report_with(p, integrator)?;
        Ok(TraceRow { step, affine_perimeter: r.affine_perimeter, perimeter: r.perimeter, petty_ratio: r.petty_ratio })
    };
    let mut rows = vec![row(0, e)?];
    let mut current = e.clone();
    let mut monotone = true;
    if directions.is_empty() {
        return Ok(SymmetrizationTrace { rows, monotone, last: current });
    }
    for step in 1..=max_steps {
        let u = &directions[(step - 1) % directions.len()];
        current = super::steiner::symmetral(&current, u)?.0;
        let r = row(step, &current)?;
        monotone &= r.affine_perimeter <= rows.last().unwrap().affine_perimeter + tol;
        rows.push(r);
    }
    Ok(SymmetrizationTrace { rows, monotone, last: current })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest value of the support function of the projection body of the
    /// symmetral at the sampled points (at most `1 + tol` when included).
    pub max_support: f64,
}

/// Checks that the symmetral of the polar projection body of `e` lies in the
/// polar projection body of the symmetral `s`, by sampling boundary points of
/// the former and evaluating the support function of the latter.
pub fn polar_inclusion_check(e: &Polytope, s: &Polytope, u: &Vector, samples: usize, seed: u64, tol: f64) -> Result<InclusionReport> {
    let pe = projection_body(&surface_area_measure(e)?)?;
    let ps = projection_body(&surface_area_measure(s)?)?;
    let frame = Frame::new(u)?;
    let n = e.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // the polar body lies in the ball of radius 1 / min h
    let mut hmin = f64::INFINITY;
    for _ in 0..4096 {
        let v = random_unit(&mut rng, n);
        hmin = hmin.min(pe.support(&v));
    }
    let reach = 2.0 / hmin;

    let mut report = InclusionReport { samples: 0, violations: 0, max_support: 0.0 };
    let mut tries = 0;
    while report.samples < samples && tries < 50 * samples {
        tries += 1;
        let z: Vec<f64> = loop {
            let z: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-reach..reach)).collect();
            if z.iter().map(|c| c * c).sum::<f64>() <= reach * reach {
                break z;
            }
        };
        let Some((lo, hi)) = chord(&pe, &frame, &z, reach) else { continue };
        let half = 0.5 * (hi - lo);
        for t in [half, -half] {
            let h = ps.support(&frame.point(&z, t));
            report.max_support = report.max_support.max(h);
            if h > 1.0 + tol {
                report.violations += 1;
            }
        }
        report.samples += 1;
    }
    Ok(report)
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    loop {
        let v = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let r = v.norm();
        if r > 1e-3 && r <= 1.0 {
            return v / r;
        }
    }
}

/// Chord `{t : h(z + t u) <= 1}` of the polar body, if the line meets it.
fn chord(body: &ProjectionBody, frame: &Frame, z: &[f64], reach: f64) -> Option<(f64, f64)> {
    let f = |t: f64| body.support(&frame.point(z, t));
    let (mut a, mut b) = (-reach, reach);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..120 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    let t0 = 0.5 * (a + b);
    if f(t0) > 1.0 {
        return None;
    }
    let root = |mut inside: f64, mut outside: f64| {
        for _ in 0..100 {
            let m = 0.5 * (inside + outside);
            if f(m) <= 1.0 {
                inside = m;
            } else {
                outside = m;
            }
        }
        0.5 * (inside + outside)
    };
    Some((root(t0, -reach), root(t0, reach)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{rectangle, regular_polygon, unit_cube, unit_square};
    use crate::geometry::{axis, vector};
    use crate::sphere::default_integrator;
    use std::f64::consts::PI;

    #[test]
    fn rounding_of_square_and_cube() {
        let r = verify_rounding(&unit_square(), BallFineness::default(), default_integrator(), 1e-6).unwrap();
        assert!(r.pass);
        assert!((r.rounded_perimeter - 4.0 / PI.sqrt()).abs() < 1e-4);
        assert!((r.perimeter - (2.0 * PI).sqrt()).abs() < 1e-14);
        let c = verify_rounding(&unit_cube(3), BallFineness::default(), default_integrator(), 1e-6).unwrap();
        assert!(c.pass);
        let expected = 2.0 * PI * (3.0 / (4.0 * PI)).powf(2.0 / 3.0);
        assert!((c.rounded_perimeter - expected).abs() < 2e-2 * expected, "{}", c.rounded_perimeter);
    }

    #[test]
    fn rounding_of_ball_is_tight() {
        let d = regular_polygon(1 << 12, 1.0, [0.0, 0.0]).unwrap();
        let r = verify_rounding(&d, BallFineness::default(), default_integrator(), 1e-6).unwrap();
        assert!(r.pass);
        assert!((r.rounded_perimeter - r.perimeter).abs() < 1e-4);
    }

    #[test]
    fn square_symmetric_report() {
        let sq = rectangle(-0.5, -0.5, 0.5, 0.5).unwrap();
        let r = verify_monotonicity(&sq, &axis(2, 0), default_integrator(), 1e-9).unwrap();
        assert!(r.pass());
        assert!((r.result.perimeter_after - r.result.perimeter_before).abs() < 1e-10);
        assert!(r.counterexample.is_none());
    }

    #[test]
    fn trace_is_monotone() {
        let e = Polytope::polygon(&[[0.0, 0.0], [3.0, 0.0], [3.5, 1.0], [1.0, 2.0], [0.2, 0.7]]).unwrap();
        let dirs: Vec<Vector> = (0..6).map(|k| {
            let a = 0.7 + 2.399_963 * k as f64;
            vector(&[a.cos(), a.sin()])
        }).collect();
        let t = iterate_symmetrization(&e, &dirs, 6, default_integrator(), 1e-9).unwrap();
        assert!(t.monotone);
        assert!(t.rows.last().unwrap().petty_ratio > t.rows[0].petty_ratio);
    }

    #[test]
    fn polar_inclusion_for_pentagon() {
        let e = Polytope::polygon(&[[0.0, 0.0], [3.0, 0.0], [3.5, 1.0], [1.0, 2.0], [0.2, 0.7]]).unwrap();
        let u = vector(&[0.3, 1.0]).normalize();
        let s = super::super::steiner::symmetral(&e, &u).unwrap().0;
        let r = polar_inclusion_check(&e, &s, &u, 200, 3, 1e-8).unwrap();
        assert_eq!(r.samples, 200);
        assert_eq!(r.violations, 0, "{}", r.max_support);
    }
}
