use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{capacity_bracket_with, capacity_convex_with, CandidateFamily, CapacityBracket};
use crate::error::Result;
use crate::functionals::affine_perimeter_with;
use crate::geometry::shapes::{diamond, rectangle};
use crate::geometry::{LinearMap, Polytope, Vector};
use crate::sphere::Integrator;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub name: &'static str,
    /// Worst observed deviation (relative unless noted).
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub deviation: f64,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub capacity: f64,
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn check(name: &'static str, deviation: f64, tolerance: f64, note: impl Into<String>) -> PropertyCheck {
    PropertyCheck { name, deviation, tolerance, pass: deviation <= tolerance, note: note.into() }
}

/// Random map in SL(n) with condition number at most `max_cond`.
pub(crate) fn random_special_linear(rng: &mut ChaCha8Rng, n: usize, max_cond: f64) -> DMatrix<f64> {
    loop {
        let mut a = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
        let det = a.determinant();
        if det.abs() < 1e-6 {
            continue;
        }
        if det < 0.0 {
            a.row_mut(0).neg_mut();
        }
        a /= det.abs().powf(1.0 / n as f64);
        let sv = a.clone().singular_values();
        let cond = sv.max() / sv.min();
        if cond <= max_cond {
            return a;
        }
    }
}

/// Scaling, SL(n) invariance, monotonicity, continuity along decreasing
/// sequences and outer regularity, on a convex body.
pub fn property_suite(k: &Polytope, seed: u64, integrator: &Integrator) -> Result<PropertyReport> {
    let n = k.dim();
    let cap = |p: &Polytope| capacity_convex_with(p, integrator);
    let c = cap(k)?;
    let center = k.centroid();
    let mut checks = Vec::new();

    checks.push(check(
        "boundary",
        0.0,
        0.0,
        "C(K) and C(boundary of K) are computed from the same facet list",
    ));

    let mut worst: f64 = 0.0;
    for r in [0.5, 2.0, 3.0] {
        let cr = cap(&k.scaled(r)?)?;
        worst = worst.max((cr / (r.powi(n as i32 - 1) * c) - 1.0).abs());
    }
    checks.push(check("scaling", worst, 1e-10, "r in {0.5, 2, 3}"));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a = random_special_linear(&mut rng, n, 100.0);
        let t = Vector::from_fn(n, |_, _| 10.0 * Distribution::<f64>::sample(&StandardNormal, &mut rng));
        let image = LinearMap::new(a, t)?.apply_map(k)?;
        worst = worst.max((cap(&image)? / c - 1.0).abs());
    }
    let sl_tol = if n == 2 { 1e-8 } else { 5e-3 };
    checks.push(check("sl_invariance", worst, sl_tol, "20 maps, condition <= 100, random translations"));

    let mut worst: f64 = 0.0;
    for delta in [1e-3, 1e-1, 1.0] {
        let bigger = cap(&k.scaled_about(1.0 + delta, &center)?)?;
        worst = worst.max((c - bigger) / c);
    }
    checks.push(check("monotonicity", worst.max(0.0), 1e-12, "K inside (1 + delta) K, delta in {1e-3, 0.1, 1}"));

    let j_min = (1.0 / ((1.0 + 1e-6f64).powf(1.0 / (n as f64 - 1.0)) - 1.0)).ceil() + 1.0;
    let mut previous = f64::INFINITY;
    let mut decreasing = true;
    let mut last = 0.0;
    for j in [1.0, 10.0, 100.0, 1000.0, j_min] {
        let cj = cap(&k.scaled_about(1.0 + 1.0 / j, &center)?)?;
        decreasing &= cj <= previous;
        previous = cj;
        last = cj;
    }
    let gap = (last - c).abs() / c;
    checks.push(check(
        "decreasing_limit",
        if decreasing { gap } else { f64::INFINITY },
        1e-6,
        format!("K_j = (1 + 1/j) K down to j = {j_min}"),
    ));

    let mut worst: f64 = 0.0;
    for eps in [1e-1, 1e-3, 1e-6] {
        let e = eps * c;
        let delta = (1.0 + 0.5 * e / c).powf(1.0 / (n as f64 - 1.0)) - 1.0;
        let outer = k.scaled_about(1.0 + delta, &center)?;
        worst = worst.max((cap(&outer)? - c - e) / e);
    }
    checks.push(check("outer_regularity", worst.max(0.0), 0.0, "dilated supersets within eps in {0.1, 1e-3, 1e-6} C(K)"));

    Ok(PropertyReport { capacity: c, checks })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Superadditive,
    Inconclusive,
}

/// Two long thin rectangles crossing at the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossReport {
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub capacity_e: f64,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub capacity_f: f64,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub sum: f64,
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub perimeter_g: f64,
    pub union: CapacityBracket,
    pub verdict: Verdict,
}

pub fn cross_union() -> Result<Polytope> {
    Polytope::polygon(&[
        [-500.0, -5.0],
        [-5.0, -5.0],
        [-5.0, -500.0],
        [5.0, -500.0],
        [5.0, -5.0],
        [500.0, -5.0],
        [500.0, 5.0],
        [5.0, 5.0],
        [5.0, 500.0],
        [-5.0, 500.0],
        [-5.0, 5.0],
        [-500.0, 5.0],
    ])
}

/// `E = [-500, 500] x [-5, 5]` and its transpose `F`: each has capacity
/// `100 sqrt(2 pi)`, while the union has capacity far above the sum. The
/// verdict is superadditive only when the certified lower end of the union's
/// bracket exceeds the sum.
pub fn cross_counterexample(family: &CandidateFamily, integrator: &Integrator) -> Result<CrossReport> {
    let e = rectangle(-500.0, -5.0, 500.0, 5.0)?;
    let f = rectangle(-5.0, -500.0, 5.0, 500.0)?;
    let capacity_e = capacity_convex_with(&e, integrator)?;
    let capacity_f = capacity_convex_with(&f, integrator)?;
    let perimeter_g = affine_perimeter_with(&diamond(500.0)?, integrator)?;
    let union = capacity_bracket_with(&cross_union()?, family, integrator)?;
    let sum = capacity_e + capacity_f;
    let verdict = if union.lower > sum { Verdict::Superadditive } else { Verdict::Inconclusive };
    Ok(CrossReport { capacity_e, capacity_f, sum, perimeter_g, union, verdict })
}
