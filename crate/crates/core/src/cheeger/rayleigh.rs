use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::mesh::{DomainMesh, GridFunction};
use crate::error::{Error, Result};
use crate::geometry::{segment_distance, vector, Atom, SurfaceAreaMeasure};
use crate::sphere::{cosine_profile_from_atoms, exact_2d_negative_square_integral};
use std::f64::consts::PI;

/// Nodes of the circle rule used for `p > 1`, over a half turn.
pub const CIRCLE_NODES: usize = 64;

fn check_exponents(p: f64, q: f64) -> Result<f64> {
    if !(1.0..2.0).contains(&q) {
        return Err(Error::Domain(format!("q = {q} outside [1, 2)")));
    }
    let denom = p - (p - 1.0) * q;
    if !(p >= 1.0) || !(denom > 0.0) {
        return Err(Error::Domain(format!("p = {p} outside [1, q/(q-1)) for q = {q}")));
    }
    Ok(p * q / denom)
}

/// `(int_{S^1} ||grad_u f||_p^-2 du / 2 pi)^(-1/2)`.
fn affine_sobolev_norm(grads: &[([f64; 2], f64)], p: f64) -> Result<f64> {
    if p == 1.0 {
        // ||grad_u f||_1 = sum area |g| |u . g/|g||, a zonotope support function
        let atoms: Vec<Atom> = grads
            .iter()
            .filter(|(g, _)| g[0] != 0.0 || g[1] != 0.0)
            .map(|(g, a)| Atom { direction: vector(g), weight: 2.0 * a * g[0].hypot(g[1]) })
            .collect();
        if atoms.is_empty() {
            return Err(Error::Domain("function is identically zero".into()));
        }
        let profile = cosine_profile_from_atoms(&SurfaceAreaMeasure::new(2, atoms)?)?;
        let integral = exact_2d_negative_square_integral(&profile)?;
        return Ok((integral / (2.0 * PI)).powf(-0.5));
    }
    let mut integral = 0.0;
    for k in 0..CIRCLE_NODES {
        let t = PI * (k as f64 + 0.5) / CIRCLE_NODES as f64;
        let (c, s) = (t.cos(), t.sin());
        let lp: f64 = grads.iter().map(|(g, a)| a * (c * g[0] + s * g[1]).abs().powf(p)).sum();
        if lp == 0.0 {
            return Err(Error::Divergent { min: 0.0, max: 0.0 });
        }
        integral += lp.powf(-2.0 / p);
    }
    // half turn suffices by symmetry; the mean over the full circle is the same
    Ok((integral / CIRCLE_NODES as f64).powf(-0.5))
}

/// `||f||_{L^r}` of a linear interpolant.
fn lebesgue_norm(mesh: &DomainMesh, values: &[f64], r: f64) -> f64 {
    let mut total = 0.0;
    for t in mesh.triangles() {
        let area = mesh.triangle_area(t);
        let v = t.map(|i| values[i]);
        if r == 1.0 && (v.iter().all(|x| *x >= 0.0) || v.iter().all(|x| *x <= 0.0)) {
            total += area * (v[0] + v[1] + v[2]).abs() / 3.0;
            continue;
        }
        // uniform 4x4 split, edge-midpoint rule on each piece
        const M: usize = 4;
        let mut s = 0.0;
        let bary = |i: usize, j: usize| {
            let (l1, l2) = (i as f64 / M as f64, j as f64 / M as f64);
            (1.0 - l1 - l2) * v[0] + l1 * v[1] + l2 * v[2]
        };
        let mut piece = |a: f64, b: f64, c: f64| {
            s += ((0.5 * (a + b)).abs().powf(r) + (0.5 * (b + c)).abs().powf(r) + (0.5 * (c + a)).abs().powf(r)) / 3.0;
        };
        for i in 0..M {
            for j in 0..M - i {
                piece(bary(i, j), bary(i + 1, j), bary(i, j + 1));
                if i + j + 1 < M {
                    piece(bary(i + 1, j), bary(i + 1, j + 1), bary(i, j + 1));
                }
            }
        }
        total += area * s / (M * M) as f64;
    }
    total.powf(1.0 / r)
}

/// Affine Rayleigh quotient
/// `q^((1-q)/q) r ||f||_{W^{1,p}_d} / ||f||_{L^r}` with `r = pq / (p - (p-1) q)`.
pub fn affine_rayleigh(f: &GridFunction, p: f64, q: f64, mesh: &DomainMesh) -> Result<f64> {
    let r = check_exponents(p, q)?;
    let values = f.values();
    if values.len() != mesh.points().len() {
        return Err(Error::DimensionMismatch { expected: mesh.points().len(), got: values.len() });
    }
    if values.iter().all(|v| *v == 0.0) {
        return Err(Error::Domain("function is identically zero".into()));
    }
    let grads: Vec<([f64; 2], f64)> = mesh.triangles().iter().map(|t| (mesh.gradient(t, values), mesh.triangle_area(t))).collect();
    let norm = affine_sobolev_norm(&grads, p)?;
    Ok(q.powf((1.0 - q) / q) * r * norm / lebesgue_norm(mesh, values, r))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayleighResult {
    #[serde(serialize_with = "crate::functionals::sig12")]
    pub value: f64,
    #[serde(skip)]
    pub function: GridFunction,
    pub converged: bool,
    pub sweeps: usize,
    /// Best value after each sweep, starting with the initial guess.
    #[serde(skip)]
    pub trace: Vec<f64>,
}

/// Distance from each vertex to the boundary of the domain.
pub(crate) fn boundary_distance(mesh: &DomainMesh) -> Result<Vec<f64>> {
    let edges = mesh.domain().edges_2d()?;
    Ok(mesh
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if mesh.is_boundary(i) {
                0.0
            } else {
                edges.iter().map(|(a, b)| segment_distance(*p, *a, *b)).fold(f64::INFINITY, f64::min)
            }
        })
        .collect())
}

/// Minimizes the affine Rayleigh quotient over grid functions.
///
/// Starts from the best of the distance function and plateaus
/// `min(1, d / delta)` (the smallest `delta` is one on every interior
/// vertex), then runs randomized coordinate descent with a step
/// halving whenever a sweep makes no progress.
pub fn minimize_rayleigh(mesh: &DomainMesh, p: f64, q: f64, iterations: usize, seed: u64) -> Result<RayleighResult> {
    check_exponents(p, q)?;
    let d = boundary_distance(mesh)?;
    let h = mesh.resolution();
    let mut best: Option<(f64, GridFunction)> = None;
    for delta in [f64::INFINITY, 4.0 * h, 2.0 * h, h, 0.25 * h] {
        let values = d.iter().map(|x| if delta.is_finite() { (x / delta).min(1.0) } else { *x }).collect();
        let f = GridFunction::new(mesh, values)?;
        let v = affine_rayleigh(&f, p, q, mesh)?;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, f));
        }
    }
    let (mut value, mut f) = best.expect("starting functions");
    let mut trace = vec![value];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut interior: Vec<usize> = (0..mesh.points().len()).filter(|&i| !mesh.is_boundary(i)).collect();
    let scale = f.values().iter().cloned().fold(0.0, f64::max);
    let mut step = 0.25 * scale;
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < iterations {
        sweeps += 1;
        interior.shuffle(&mut rng);
        let before = value;
        for &i in &interior {
            for dir in [1.0, -1.0] {
                let old = f.values()[i];
                let new = (old + dir * step).max(0.0);
                if new == old {
                    continue;
                }
                f.values_mut()[i] = new;
                match affine_rayleigh(&f, p, q, mesh) {
                    Ok(v) if v < value => {
                        value = v;
                        break;
                    }
                    _ => f.values_mut()[i] = old,
                }
            }
        }
        trace.push(value);
        if before - value <= 1e-6 * value {
            step *= 0.5;
            if step < 1e-3 * scale {
                converged = true;
                break;
            }
        }
    }
    Ok(RayleighResult { value, function: f, converged, sweeps, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::regular_polygon;

    fn disk_mesh(h: f64) -> DomainMesh {
        let sides = (2.0 * PI / h).ceil() as usize;
        DomainMesh::new(&regular_polygon(sides, 1.0, [0.0, 0.0]).unwrap(), h).unwrap()
    }

    #[test]
    fn homogeneity() {
        let m = disk_mesh(0.2);
        let f = GridFunction::from_fn(&m, |x| 1.0 - x[0].hypot(x[1]) + 0.3 * x[0]).unwrap();
        for (p, q) in [(1.0, 1.0), (1.0, 1.5), (1.2, 1.5)] {
            let a = affine_rayleigh(&f, p, q, &m).unwrap();
            let b = affine_rayleigh(&f.scaled(-2.5), p, q, &m).unwrap();
            assert!((a - b).abs() <= 1e-13 * a, "{a} {b}");
        }
    }

    #[test]
    fn plateau_on_a_sub_disk() {
        let oracle = 4.0 / (PI * 0.5);
        let errors: Vec<f64> = [0.04, 0.02, 0.01]
            .iter()
            .map(|&h| {
                let m = disk_mesh(h);
                let f = GridFunction::from_fn(&m, |x| ((0.5 - x[0].hypot(x[1])) / 0.1 + 0.5).clamp(0.0, 1.0)).unwrap();
                (affine_rayleigh(&f, 1.0, 1.0, &m).unwrap() / oracle - 1.0).abs()
            })
            .collect();
        assert!(errors[2] < errors[0] && errors[2] < 3e-2, "{errors:?}");
    }

    #[test]
    fn cone_is_above_the_cheeger_value() {
        let m = disk_mesh(0.1);
        let f = GridFunction::from_fn(&m, |x| 1.0 - x[0].hypot(x[1])).unwrap();
        let v = affine_rayleigh(&f, 1.0, 1.0, &m).unwrap();
        assert!(v >= 4.0 / PI);
    }

    #[test]
    fn rejects_bad_input() {
        let m = disk_mesh(0.5);
        let zero = GridFunction::from_fn(&m, |_| 0.0).unwrap();
        assert!(matches!(affine_rayleigh(&zero, 1.0, 1.0, &m), Err(Error::Domain(_))));
        let f = GridFunction::from_fn(&m, |_| 1.0).unwrap();
        assert!(affine_rayleigh(&f, 1.0, 2.0, &m).is_err());
        assert!(affine_rayleigh(&f, 3.0, 1.5, &m).is_err());
        assert!(affine_rayleigh(&f, 0.5, 1.0, &m).is_err());
    }

    #[test]
    fn refinement_decreases() {
        let values: Vec<f64> =
            [0.2, 0.1, 0.05].iter().map(|&h| minimize_rayleigh(&disk_mesh(h), 1.0, 1.0, 0, 0).unwrap().value).collect();
        assert!(values[0] >= values[1] && values[1] >= values[2], "{values:?}");
        assert!((values[2] / (4.0 / PI) - 1.0).abs() < 5e-2);
    }
}
