//! The `verify` subcommand: inequality and property checks over a seeded corpus.

use affine_bv::capacity::{property_suite, PropertyReport};
use affine_bv::corpus::{self, Corpus, CorpusSpec};
use affine_bv::functionals::{inequality_report_with, BallFineness};
use affine_bv::sphere::Integrator;
use affine_bv::symmetrize::{verify_monotonicity, verify_rounding};
use affine_bv::{Polytope, Vector};
use rayon::prelude::*;
use serde::Serialize;

use super::{json, Failure, Outcome};

#[derive(Debug, Serialize)]
struct CheckSummary {
    name: &'static str,
    cases: usize,
    failures: usize,
    #[serde(serialize_with = "sig")]
    worst: f64,
    #[serde(serialize_with = "sig")]
    tolerance: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    errors: Vec<String>,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    seed: u64,
    count: usize,
    checks: Vec<CheckSummary>,
    pass: bool,
}

fn sig<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(affine_bv::io::round_sig(*x))
    } else {
        s.serialize_str(&affine_bv::io::fmt_sig(*x))
    }
}

/// Runs `deviation` on every case in parallel; a case fails when its
/// deviation exceeds `tolerance` or it errors.
fn summarize<T: Sync>(
    name: &'static str,
    cases: &[T],
    tolerance: f64,
    deviation: impl Fn(&T) -> affine_bv::Result<f64> + Sync,
) -> CheckSummary {
    let results: Vec<affine_bv::Result<f64>> = cases.par_iter().map(&deviation).collect();
    let mut summary = CheckSummary { name, cases: cases.len(), failures: 0, worst: f64::NEG_INFINITY, tolerance, errors: Vec::new() };
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(d) => {
                summary.worst = summary.worst.max(d);
                if !(d <= tolerance) {
                    summary.failures += 1;
                }
            }
            Err(e) => {
                summary.failures += 1;
                summary.errors.push(format!("case {i}: {e}"));
            }
        }
    }
    summary
}

pub(super) fn run(seed: u64, count: usize, integrator: &Integrator, tol: Option<f64>) -> Result<Outcome, Failure> {
    let spec = CorpusSpec { convex_polygons: count, star_polygons: count.div_ceil(4), polytopes: count.div_ceil(5) };
    let corpus = Corpus::generate(seed, spec).map_err(|e| Failure::Other(e.to_string()))?;
    let polygons: Vec<&Polytope> = corpus.convex_polygons.iter().chain(&corpus.star_polygons).collect();
    let all: Vec<&Polytope> = corpus.all().collect();

    let mut rng = corpus::rng(seed ^ 0x5eed);
    let steiner_cases: Vec<(&Polytope, Vector)> = all.iter().map(|p| (*p, corpus::random_direction(&mut rng, p.dim()))).collect();
    let convex: Vec<&Polytope> = corpus.convex_polygons.iter().chain(&corpus.polytopes).collect();
    let suites: Vec<(u64, &Polytope)> =
        corpus.convex_polygons.iter().take(10).enumerate().map(|(i, p)| (seed.wrapping_add(i as u64), p)).collect();

    let report = |p: &Polytope| inequality_report_with(p, integrator);
    let steiner: Vec<_> = steiner_cases.par_iter().map(|(p, u)| verify_monotonicity(p, u, integrator, f64::INFINITY)).collect();
    let suites: Vec<_> = suites.par_iter().map(|(s, p)| property_suite(p, *s, integrator)).collect();
    let property = |name: &'static str| {
        move |r: &affine_bv::Result<PropertyReport>| {
            let r = r.as_ref().map_err(Clone::clone)?;
            Ok(r.checks.iter().find(|c| c.name == name).map_or(f64::INFINITY, |c| c.deviation))
        }
    };
    let checks = vec![
        summarize("petty_2d", &polygons, tol.unwrap_or(1e-6), |p| Ok(report(p)?.petty_ratio - 1.0)),
        summarize("petty_3d", &corpus.polytopes, tol.unwrap_or(2e-3), |p| Ok(report(p)?.petty_ratio - 1.0)),
        summarize("perimeter_radius", &all, tol.unwrap_or(1e-9), |p| {
            let r = report(p)?;
            Ok(-r.slack_e12p / r.perimeter)
        }),
        summarize("isoperimetric_order", &all, tol.unwrap_or(1e-9), |p| {
            let r = report(p)?;
            Ok(r.iso_classical / r.iso_affine - 1.0)
        }),
        summarize("steiner_affine", &steiner, tol.unwrap_or(1e-9), |m| {
            let m = m.as_ref().map_err(Clone::clone)?;
            Ok(m.result.perimeter_after - m.result.perimeter_before)
        }),
        summarize("steiner_volume", &steiner, 1e-10, |m| Ok(m.as_ref().map_err(Clone::clone)?.result.volume_error())),
        summarize("rounding", &convex, tol.unwrap_or(1e-6), |p| {
            let r = verify_rounding(p, BallFineness::default(), integrator, f64::INFINITY)?;
            Ok(r.rounded_perimeter - r.perimeter)
        }),
        summarize("capacity_scaling", &suites, tol.unwrap_or(1e-9), property("scaling")),
        summarize("capacity_sl_invariance", &suites, tol.unwrap_or(1e-8), property("sl_invariance")),
    ];
    let pass = checks.iter().all(|c| c.failures == 0);
    let failed: Vec<&str> = checks.iter().filter(|c| c.failures > 0).map(|c| c.name).collect();
    let text = json(&VerifyReport { seed, count, checks, pass });
    let ok = if pass { Ok(()) } else { Err(format!("failed checks: {}", failed.join(", "))) };
    Ok(Outcome { report: text, ok })
}
