//! Integration over the unit sphere S^(n-1).
//!
//! In the plane integrals of `h^-2` for piecewise-cosine `h` (supports of
//! zonotopes) are evaluated in closed form, arc by arc. For n >= 3 product
//! rules are used, Gauss-Legendre in the polar coordinate times a uniform
//! azimuth, applied recursively above R^3.

pub mod adaptive;
mod profile;
mod rule;

pub use adaptive::adaptive_simpson;
pub use profile::{cosine_profile_from_atoms, exact_2d_negative_square_integral, Arc, PiecewiseCosineProfile};
pub use rule::{build_rule, gauss_legendre, integrate, integrate_negative_power, QuadratureRule};

use std::sync::OnceLock;

/// Default product-rule order in R^3.
pub const DEFAULT_ORDER: usize = 48;

/// Lazily built quadrature rules, one per dimension, for a given base order.
///
/// Above R^3 the order is halved per extra dimension (never below 6) so the
/// node count stays manageable; callers wanting a specific order per
/// dimension use [`Integrator::with_orders`].
#[derive(Debug)]
pub struct Integrator {
    orders: [usize; 7],
    rules: [OnceLock<QuadratureRule>; 7],
}

impl Default for Integrator {
    fn default() -> Self {
        Self::new(DEFAULT_ORDER)
    }
}

impl Clone for Integrator {
    fn clone(&self) -> Self {
        Self::with_orders(self.orders)
    }
}

impl Integrator {
    pub fn new(order: usize) -> Self {
        let mut orders = [0; 7];
        for (n, o) in orders.iter_mut().enumerate().skip(3) {
            *o = if n == 3 { order } else { (order >> (n - 3)).max(6) };
        }
        Self::with_orders(orders)
    }

    /// Orders indexed by dimension (entries below 3 are ignored).
    pub fn with_orders(orders: [usize; 7]) -> Self {
        Self { orders, rules: Default::default() }
    }

    pub fn order(&self, n: usize) -> usize {
        self.orders.get(n).copied().unwrap_or(0)
    }

    /// Rule for S^(n-1), 3 <= n <= 6.
    pub fn rule(&self, n: usize) -> crate::Result<&QuadratureRule> {
        if !(3..=6).contains(&n) {
            return Err(crate::Error::Domain(format!(
                "quadrature rules cover 3 <= n <= 6, got {n}; the plane uses the exact arc integrator"
            )));
        }
        if let Some(r) = self.rules[n].get() {
            return Ok(r);
        }
        let built = build_rule(n, self.orders[n])?;
        Ok(self.rules[n].get_or_init(|| built))
    }
}

/// Shared default integrator.
pub fn default_integrator() -> &'static Integrator {
    static DEFAULT: OnceLock<Integrator> = OnceLock::new();
    DEFAULT.get_or_init(Integrator::default)
}
