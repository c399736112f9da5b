use crate::error::{Error, Result};
use crate::geometry::{pairwise_sum, Vector};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Nodes on S^(n-1) with positive weights summing to the sphere measure.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    dim: usize,
    nodes: Vec<Vector>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[Vector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on the Legendre
/// recurrence, nodes symmetric to machine precision).
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; order];
    let mut w = vec![0.0; order];
    let m = order.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=order {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if order == 0 { 1.0 } else { p1 };
            let pm1 = if order == 1 { 1.0 } else { p0 };
            dp = order as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = weight;
        w[order - 1 - i] = weight;
    }
    if order % 2 == 1 {
        x[order / 2] = 0.0;
    }
    (x, w)
}

/// Product rule on S^(n-1).
///
/// R^3: Gauss-Legendre in `cos(polar)` (`order` nodes) times `2 order`
/// uniform azimuths. Above: Gauss-Legendre in the polar angle on `[0, pi]`
/// with the `sin^(n-2)` Jacobian, times the rule one dimension down. The
/// product grid is then turned by a fixed rotation. Every rule is
/// antipodally symmetric.
pub fn build_rule(n: usize, order: usize) -> Result<QuadratureRule> {
    let mut rule = product_rule(n, order)?;
    let q = generic_rotation(n);
    for u in &mut rule.nodes {
        *u = &q * &*u;
    }
    Ok(rule)
}

/// Fixed rotation in general position, so kinks of axis-aligned integrands
/// do not line up with the grid.
fn generic_rotation(n: usize) -> nalgebra::DMatrix<f64> {
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| ((i * n + j + 1) as f64 * 0.618_033_988_749_895).fract() - 0.5);
    let q = a.qr().q();
    if q.determinant() < 0.0 {
        -q
    } else {
        q
    }
}

fn product_rule(n: usize, order: usize) -> Result<QuadratureRule> {
    if n < 3 {
        return Err(Error::Domain(format!("no product rule for n = {n}; use the exact planar integrator")));
    }
    if order < 4 {
        return Err(Error::Domain(format!("quadrature order must be at least 4, got {order}")));
    }
    if n > 6 {
        return Err(Error::Domain(format!("dimension {n} exceeds the supported maximum 6")));
    }
    let (gx, gw) = gauss_legendre(order);
    if n == 3 {
        let azimuths = 2 * order;
        let dphi = 2.0 * PI / azimuths as f64;
        let mut nodes = Vec::with_capacity(order * azimuths);
        let mut weights = Vec::with_capacity(order * azimuths);
        for (t, wt) in gx.iter().zip(&gw) {
            let s = (1.0 - t * t).sqrt();
            for j in 0..azimuths {
                let phi = (j as f64 + 0.5) * dphi;
                nodes.push(Vector::from_column_slice(&[s * phi.cos(), s * phi.sin(), *t]));
                weights.push(wt * dphi);
            }
        }
        return Ok(QuadratureRule { dim: 3, nodes, weights });
    }
    let sub = product_rule(n - 1, order)?;
    let mut nodes = Vec::with_capacity(order * sub.len());
    let mut weights = Vec::with_capacity(order * sub.len());
    for (x, wx) in gx.iter().zip(&gw) {
        let theta = 0.5 * PI * (x + 1.0);
        let (s, c) = theta.sin_cos();
        let jac = 0.5 * PI * wx * s.powi(n as i32 - 2);
        for (v, wv) in sub.nodes.iter().zip(&sub.weights) {
            let mut u = Vector::zeros(n);
            u[0] = c;
            for k in 0..n - 1 {
                u[k + 1] = s * v[k];
            }
            nodes.push(u);
            weights.push(jac * wv);
        }
    }
    Ok(QuadratureRule { dim: n, nodes, weights })
}

const PARALLEL_THRESHOLD: usize = 8192;

/// `sum_i w_i f(u_i)`; node evaluations may run in parallel, the reduction
/// order is fixed.
pub fn integrate<F>(rule: &QuadratureRule, f: F) -> f64
where
    F: Fn(&Vector) -> f64 + Sync,
{
    let terms: Vec<f64> = if rule.len() >= PARALLEL_THRESHOLD {
        rule.nodes.par_iter().zip(rule.weights.par_iter()).map(|(u, w)| w * f(u)).collect()
    } else {
        rule.nodes.iter().zip(&rule.weights).map(|(u, w)| w * f(u)).collect()
    };
    pairwise_sum(&terms)
}

/// `sum_i w_i h(u_i)^-n`.
///
/// Fails with [`Error::Divergent`] when `h <= 1e-12 max h` at some node: the
/// body `{h <= 1}` is then unbounded in some direction.
pub fn integrate_negative_power<H>(h: H, n: usize, rule: &QuadratureRule) -> Result<f64>
where
    H: Fn(&Vector) -> f64 + Sync,
{
    if rule.dim() != n {
        return Err(Error::DimensionMismatch { expected: rule.dim(), got: n });
    }
    let values: Vec<f64> = if rule.len() >= PARALLEL_THRESHOLD {
        rule.nodes.par_iter().map(&h).collect()
    } else {
        rule.nodes.iter().map(&h).collect()
    };
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= 1e-12 * max {
        return Err(Error::Divergent { min, max });
    }
    let terms: Vec<f64> = values.iter().zip(&rule.weights).map(|(v, w)| w * v.powi(-(n as i32))).collect();
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sphere_measure;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        let s0: f64 = w.iter().sum();
        assert!((s0 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn normalisation_in_three_dimensions() {
        let r = build_rule(3, 32).unwrap();
        let total: f64 = r.weights().iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-10);
        let ones = integrate_negative_power(|_| 1.0, 3, &r).unwrap();
        assert!((ones - 4.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn second_moment() {
        let r = build_rule(3, 32).unwrap();
        let m = integrate(&r, |u| u[2] * u[2]);
        assert!((m - 4.0 * PI / 3.0).abs() < 1e-8);
        let m0 = integrate(&r, |u| u[0] * u[0]);
        assert!((m0 - 4.0 * PI / 3.0).abs() < 1e-8);
    }

    #[test]
    fn ball_of_radius_r() {
        let r = build_rule(3, 16).unwrap();
        let v = integrate_negative_power(|_| 2.5, 3, &r).unwrap();
        assert!((v - 4.0 * PI / 2.5f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn higher_dimensional_normalisation() {
        for (n, order) in [(4, 12), (5, 12), (6, 10)] {
            let r = build_rule(n, order).unwrap();
            let total: f64 = r.weights().iter().sum();
            assert!((total - sphere_measure(n)).abs() < 1e-8 * sphere_measure(n), "n = {n}");
            let exact = sphere_measure(n) / n as f64;
            let m = integrate(&r, |u| u[0] * u[0]);
            assert!((m - exact).abs() < 1e-5 * exact, "n = {n}: {m} {exact}");
            let m = integrate(&r, |u| u[n - 1] * u[n - 1]);
            assert!((m - exact).abs() < 1e-5 * exact, "n = {n}");
        }
    }

    #[test]
    fn antipodal_symmetry() {
        for n in [3, 4] {
            let r = build_rule(n, 8).unwrap();
            for (u, w) in r.nodes().iter().zip(r.weights()) {
                let k = r.nodes().iter().position(|v| (v + u).norm() < 1e-12).expect("antipode present");
                assert!((r.weights()[k] - w).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn divergence_detected() {
        let r = build_rule(3, 8).unwrap();
        let err = integrate_negative_power(|u| u[0].abs() + u[1].abs() - (u[0].abs() + u[1].abs()), 3, &r);
        assert!(matches!(err, Err(Error::Divergent { .. })));
    }

    #[test]
    fn rejects_planar_and_low_order() {
        assert!(matches!(build_rule(2, 32), Err(Error::Domain(_))));
        assert!(matches!(build_rule(3, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn cube_profile_converges() {
        let h = |u: &Vector| u[0].abs() + u[1].abs() + u[2].abs();
        let a = integrate_negative_power(h, 3, &build_rule(3, 32).unwrap()).unwrap();
        let b = integrate_negative_power(h, 3, &build_rule(3, 64).unwrap()).unwrap();
        assert!((a / b - 1.0).abs() < 5e-4, "{}", a / b - 1.0);
    }
}
