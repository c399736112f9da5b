use super::{omega_n, projection_body};
use crate::error::{Error, Result};
use crate::geometry::{classical_perimeter, surface_area_measure, Polytope};
use crate::io::{fmt_sig, round_sig};
use crate::sphere::{default_integrator, Integrator};
use serde::{Serialize, Serializer};

/// Volume, both perimeters, polar volume and the normalised ratios of the
/// classical and affine isoperimetric inequalities.
///
/// - `petty_ratio = V^(n-1) V(polar of Pi E) / (w_n / w_(n-1))^n`, at most 1.
/// - `iso_classical = (V / w_n)^(1/n) / (P / (n w_n))^(1/(n-1))`, at most 1.
/// - `iso_affine` is the same with `P_d / (2 w_(n-1))`; it dominates `iso_classical`.
/// - `slack_e12p = P / (n w_n) - P_d / (2 w_(n-1))`, non-negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerimeterReport {
    pub dimension: usize,
    #[serde(serialize_with = "sig12")]
    pub volume: f64,
    #[serde(serialize_with = "sig12")]
    pub perimeter: f64,
    #[serde(serialize_with = "sig12")]
    pub affine_perimeter: f64,
    #[serde(serialize_with = "sig12")]
    pub polar_volume: f64,
    #[serde(serialize_with = "sig12")]
    pub petty_ratio: f64,
    #[serde(serialize_with = "sig12")]
    pub iso_classical: f64,
    #[serde(serialize_with = "sig12")]
    pub iso_affine: f64,
    #[serde(serialize_with = "sig12")]
    pub slack_e12p: f64,
}

pub(crate) fn sig12<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(round_sig(*x))
    } else {
        s.serialize_str(&fmt_sig(*x))
    }
}

impl PerimeterReport {
    pub const CSV_HEADER: &'static str = "V,P_BV,P_BVd,V_polar,petty_ratio,iso_classical,iso_affine,slack_e12P";

    pub fn csv_row(&self) -> String {
        [
            self.volume,
            self.perimeter,
            self.affine_perimeter,
            self.polar_volume,
            self.petty_ratio,
            self.iso_classical,
            self.iso_affine,
            self.slack_e12p,
        ]
        .iter()
        .map(|&x| fmt_sig(x))
        .collect::<Vec<_>>()
        .join(",")
    }
}

pub fn inequality_report(e: &Polytope) -> Result<PerimeterReport> {
    inequality_report_with(e, default_integrator())
}

pub fn inequality_report_with(e: &Polytope, integrator: &Integrator) -> Result<PerimeterReport> {
    let n = e.dim();
    let volume = e.volume();
    if !(volume > 0.0) {
        return Err(Error::Degenerate { rank: n - 1, dim: n });
    }
    let s = surface_area_measure(e)?;
    let perimeter = classical_perimeter(&s);
    let z = projection_body(&s)?;
    let polar_volume = z.polar_volume(integrator)?;
    let affine_perimeter = super::perimeter_from_polar_volume(n, polar_volume);
    let nf = n as f64;
    let (wn, wn1) = (omega_n(n), omega_n(n - 1));
    let petty_ratio = volume.powi(n as i32 - 1) * polar_volume / (wn / wn1).powi(n as i32);
    let volume_radius = (volume / wn).powf(1.0 / nf);
    let iso_classical = volume_radius / (perimeter / (nf * wn)).powf(1.0 / (nf - 1.0));
    let iso_affine = volume_radius / (affine_perimeter / (2.0 * wn1)).powf(1.0 / (nf - 1.0));
    let slack_e12p = perimeter / (nf * wn) - affine_perimeter / (2.0 * wn1);
    Ok(PerimeterReport {
        dimension: n,
        volume,
        perimeter,
        affine_perimeter,
        polar_volume,
        petty_ratio,
        iso_classical,
        iso_affine,
        slack_e12p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{ellipse, unit_cube, unit_square};
    use std::f64::consts::PI;

    #[test]
    fn unit_square_values() {
        let r = inequality_report(&unit_square()).unwrap();
        // V = 1, V(polar) = 2, w_2 = pi, w_1 = 2
        assert!((r.petty_ratio - 2.0 / (PI / 2.0).powi(2)).abs() < 1e-14);
        assert!((r.petty_ratio - 0.8105694691387022).abs() < 1e-12);
        assert!(r.iso_affine >= r.iso_classical);
        assert!(r.slack_e12p > 0.0);
    }

    #[test]
    fn fine_ellipse_is_nearly_extremal() {
        let r = inequality_report(&ellipse(3.0, 1.0, 4096, [0.5, 0.0]).unwrap()).unwrap();
        assert!(r.petty_ratio <= 1.0 + 1e-12, "{}", r.petty_ratio - 1.0);
        assert!(r.petty_ratio > 1.0 - 1e-4);
    }

    #[test]
    fn unit_cube_slack() {
        let r = inequality_report(&unit_cube(3)).unwrap();
        let expected = 6.0 / (4.0 * PI) - (8.0 * PI).powf(1.0 / 3.0) / (2.0 * PI);
        assert!((r.slack_e12p - expected).abs() < 1e-3);
        assert!(r.slack_e12p > 0.0);
    }

    #[test]
    fn csv_layout() {
        let r = inequality_report(&unit_square()).unwrap();
        let row = r.csv_row();
        assert_eq!(row.split(',').count(), PerimeterReport::CSV_HEADER.split(',').count());
        assert!(row.starts_with("1,4,2.50662827463,2,"));
    }
}
