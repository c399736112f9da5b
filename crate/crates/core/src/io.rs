//! Polytope JSON, report formatting.
//!
//! Polytope files look like
//!
//! ```json
//! {"dimension": 2, "vertices": [[0,0],[1,0],[1,1],[0,1]]}
//! ```
//!
//! with an optional `"facets"` list of `{"normal", "measure", "offset"}`
//! objects (plus optional `"vertices"` indices per facet). Without facets the
//! set is the convex hull of the vertices, unless `"kind": "polygon"` says the
//! vertices form a simple polygon ring.

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, Facet, Polytope, Vector};
use serde::{Deserialize, Serialize};

/// Formats with 12 significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    let s = if (-5..12).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // rounding may carry into a new digit (9.99... -> 10.0); reformat then
        let digits = s.trim_start_matches('-').split('.').next().unwrap().trim_start_matches('0').len();
        let s = if digits > (e + 1).max(0) as usize && decimals > 0 {
            let d = decimals - 1;
            format!("{x:.d$}")
        } else {
            s
        };
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mantissa, exp) = s.split_once('e').unwrap();
        let mantissa =
            if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
        format!("{mantissa}e{exp}")
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FacetJson {
    pub normal: Vec<f64>,
    pub measure: f64,
    pub offset: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dimension: usize,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<FacetJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
}

impl PolytopeJson {
    pub fn from_polytope(p: &Polytope) -> Self {
        Self {
            dimension: p.dim(),
            vertices: p.vertices().iter().map(|v| v.iter().cloned().collect()).collect(),
            facets: Some(
                p.facets()
                    .iter()
                    .map(|f| FacetJson {
                        normal: f.normal.iter().cloned().collect(),
                        measure: f.measure,
                        offset: f.offset,
                        vertices: f.vertices.clone(),
                    })
                    .collect(),
            ),
            kind: None,
        }
    }

    pub fn to_polytope(&self) -> Result<Polytope> {
        let n = self.dimension;
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if v.len() != n {
                return Err(Error::InvalidPolytope(format!("vertices[{i}] has {} coordinates, expected {n}", v.len())));
            }
            vertices.push(Vector::from_column_slice(v));
        }
        match (&self.facets, self.kind.as_deref()) {
            (Some(facets), _) => {
                let mut out = Vec::with_capacity(facets.len());
                for (k, f) in facets.iter().enumerate() {
                    if f.normal.len() != n {
                        return Err(Error::InvalidPolytope(format!("facets[{k}].normal has {} coordinates", f.normal.len())));
                    }
                    out.push(Facet {
                        normal: Vector::from_column_slice(&f.normal),
                        measure: f.measure,
                        offset: f.offset,
                        vertices: f.vertices.clone(),
                    });
                }
                Polytope::from_facets(n, vertices, out)
            }
            (None, Some("polygon")) => {
                if n != 2 {
                    return Err(Error::InvalidPolytope("kind \"polygon\" requires dimension 2".into()));
                }
                let ring: Vec<[f64; 2]> = vertices.iter().map(|v| [v[0], v[1]]).collect();
                Polytope::polygon(&ring)
            }
            (None, Some(other)) => Err(Error::InvalidPolytope(format!("unknown kind \"{other}\""))),
            (None, None) => convex_hull(&vertices),
        }
    }
}

pub fn polytope_from_json(text: &str) -> std::result::Result<Polytope, JsonError> {
    let parsed: PolytopeJson = serde_json::from_str(text).map_err(|e| JsonError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    parsed.to_polytope().map_err(JsonError::Content)
}

pub(crate) fn ser_polytope<S: serde::Serializer>(p: &Polytope, s: S) -> std::result::Result<S::Ok, S::Error> {
    PolytopeJson::from_polytope(p).serialize(s)
}

pub(crate) fn ser_vector<S: serde::Serializer>(v: &Vector, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|x| round_sig(*x)).collect::<Vec<f64>>().serialize(s)
}

pub fn polytope_to_json(p: &Polytope) -> String {
    serde_json::to_string_pretty(&PolytopeJson::from_polytope(p)).expect("serialisable")
}

/// Failure to read a polytope file: malformed JSON or invalid content.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JsonError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error(transparent)]
    Content(Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(2.5066282746310002), "2.50662827463");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-0.5), "-0.5");
        assert_eq!(fmt_sig(1772.4538509055161), "1772.45385091");
        assert_eq!(fmt_sig(9.9999999999999), "10");
        assert_eq!(fmt_sig(1.5e-9), "1.5e-9");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(round_sig(std::f64::consts::PI), 3.14159265359);
    }

    #[test]
    fn convex_hull_when_facets_missing() {
        let p = polytope_from_json(r#"{"dimension": 2, "vertices": [[0,0],[1,0],[0.5,0.2],[1,1],[0,1]]}"#).unwrap();
        assert_eq!(p.facets().len(), 4);
        assert!((p.volume() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn polygon_kind() {
        let p = polytope_from_json(
            r#"{"dimension": 2, "kind": "polygon", "vertices": [[0,0],[2,0],[2,1],[1,1],[1,2],[0,2]]}"#,
        )
        .unwrap();
        assert!(!p.is_convex());
        assert!((p.volume() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = polytope_from_json("{\"dimension\": 2,\n \"vertices\": [[0,0],}").unwrap_err();
        match err {
            JsonError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn explicit_facets_round_trip() {
        let p = crate::geometry::shapes::unit_cube(3);
        let q = polytope_from_json(&polytope_to_json(&p)).unwrap();
        assert_eq!(p.vertices().len(), q.vertices().len());
        for (a, b) in p.vertices().iter().zip(q.vertices()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((q.volume() - 1.0).abs() < 1e-12);
    }
}
