use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Volume of the unit ball in R^k, `pi^(k/2) / Gamma(1 + k/2)`.
///
/// Evaluated with the recurrence `w_k = (2 pi / k) w_(k-2)`, `w_0 = 1`,
/// `w_1 = 2`, which is exact up to one rounding per step.
pub fn omega(k: i64) -> Result<f64> {
    if k < 1 {
        return Err(Error::Domain(format!("omega requires k >= 1, got {k}")));
    }
    Ok(omega_unchecked(k as usize))
}

pub(crate) fn omega_unchecked(k: usize) -> f64 {
    let mut w = if k % 2 == 0 { 1.0 } else { 2.0 };
    let mut j = if k % 2 == 0 { 2 } else { 3 };
    while j <= k {
        w *= 2.0 * PI / j as f64;
        j += 2;
    }
    w
}

/// Surface measure of the unit sphere S^(k-1), `k w_k`.
pub fn sphere_measure(k: usize) -> f64 {
    k as f64 * omega_unchecked(k)
}

/// Table of ball volumes and sphere measures up to a maximal dimension.
#[derive(Debug, Clone)]
pub struct Constants {
    omega: Vec<f64>,
}

impl Constants {
    pub fn new(n_max: usize) -> Self {
        Self { omega: (0..=n_max).map(omega_unchecked).collect() }
    }

    pub fn omega(&self, k: usize) -> f64 {
        self.omega[k]
    }

    /// `sigma_(k-1) = k w_k`.
    pub fn sigma(&self, k: usize) -> f64 {
        k as f64 * self.omega[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_dimensions() {
        assert!((omega(1).unwrap() - 2.0).abs() < 1e-14);
        assert!((omega(2).unwrap() - PI).abs() < 1e-14);
        assert!((omega(3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((omega(4).unwrap() - PI * PI / 2.0).abs() < 1e-14);
        assert!((omega(5).unwrap() - 8.0 * PI * PI / 15.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(matches!(omega(0), Err(Error::Domain(_))));
        assert!(matches!(omega(-3), Err(Error::Domain(_))));
    }

    #[test]
    fn table() {
        let c = Constants::new(6);
        assert!((c.sigma(2) - 2.0 * PI).abs() < 1e-14);
        assert!((c.sigma(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_measure(3) - 4.0 * PI).abs() < 1e-14);
    }
}
