use serde::{Deserialize, Serialize};

/// Tolerance record shared by every module.
///
/// `abs` guards comparisons of quantities near zero, `rel` guards comparisons
/// scaled by a magnitude. Acceptance checks state their own thresholds; this
/// record carries the library defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-8 }
    }
}

impl Tolerances {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    /// `a <= b` up to `abs + rel * max(|a|, |b|)`.
    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b + self.abs + self.rel * a.abs().max(b.abs())
    }

    pub fn eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs + self.rel * a.abs().max(b.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let t = Tolerances::default();
        assert_eq!(t.abs, 1e-10);
        assert_eq!(t.rel, 1e-8);
        assert!(t.le(1.0 + 1e-9, 1.0));
        assert!(!t.le(1.0 + 1e-6, 1.0));
        assert!(t.eq(100.0, 100.0 + 1e-7));
    }
}
