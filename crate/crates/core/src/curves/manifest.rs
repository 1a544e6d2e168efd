//! JSON manifests describing a curve or a biquadratic diagram.
//!
//! ```json
//! {"kind": "hyperelliptic", "p": 3, "k": 1, "f": [0, 1, 0, 1]}
//! {"kind": "plane", "p": 5, "k": 1, "d": 4, "F": [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1]}
//! {"kind": "biquadratic", "p": 3, "k": 1, "f": [0, 1, 0, 1], "g": [2, 1, 1]}
//! ```
//!
//! Coefficient arrays ascend by degree. A plane form is listed densely over
//! the exponents `x^a y^b z^(d-a-b)` with `a` outer and `b` inner, both
//! ascending. Inputs may use any integer representatives; output is always
//! reduced into `[0, p)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    make_biquadratic, make_hyperelliptic, make_projective_line, make_smooth_plane, Certificate,
    CurveError, CurveKind, CurveModel, DiagramData, Monomial, PlaneForm,
};
use crate::finite_field::construct_field;
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ManifestError {
    #[error("malformed manifest: {0}")]
    Syntax(String),
    #[error("manifest of kind {kind} is missing field `{field}`")]
    MissingField {
        kind: &'static str,
        field: &'static str,
    },
    #[error("diagram certificate is false; the diagram bound does not apply")]
    InvalidCertificate,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifestKind {
    Line,
    Hyperelliptic,
    Plane,
    Biquadratic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub kind: ManifestKind,
    pub p: u64,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub form: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ManifestCertificate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestCertificate {
    pub absolutely_irreducible: bool,
    pub smooth: bool,
}

/// What a manifest describes once validated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subject {
    Curve(CurveModel),
    Diagram(Box<DiagramData>),
}

fn signed(coeffs: &[u64]) -> Vec<i64> {
    coeffs.iter().map(|&c| c as i64).collect()
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        serde_json::from_str(text).map_err(|e| ManifestError::Syntax(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    fn blank(kind: ManifestKind, p: u64, k: usize) -> Self {
        Manifest {
            kind,
            p,
            k,
            f: None,
            g: None,
            d: None,
            form: None,
            label: None,
            certificate: None,
        }
    }

    pub fn from_curve(curve: &CurveModel) -> Self {
        let base = curve.base();
        let (p, k) = (base.characteristic(), base.degree());
        let mut m = match curve.kind() {
            CurveKind::ProjectiveLine => Manifest::blank(ManifestKind::Line, p, k),
            CurveKind::Hyperelliptic { f } => Manifest {
                f: Some(signed(f.coeffs())),
                ..Manifest::blank(ManifestKind::Hyperelliptic, p, k)
            },
            CurveKind::SmoothPlane { form } => Manifest {
                d: Some(form.degree()),
                form: Some(signed(&form.to_dense())),
                ..Manifest::blank(ManifestKind::Plane, p, k)
            },
            CurveKind::BiquadraticTotalSpace { f, g } => Manifest {
                f: Some(signed(f.coeffs())),
                g: Some(signed(g.coeffs())),
                ..Manifest::blank(ManifestKind::Biquadratic, p, k)
            },
        };
        m.label = Some(curve.label().to_string());
        m
    }

    pub fn from_diagram(d: &DiagramData) -> Self {
        let c = d.certificate();
        Manifest {
            certificate: Some(ManifestCertificate {
                absolutely_irreducible: c.absolutely_irreducible,
                smooth: c.smooth,
            }),
            ..Manifest::from_curve(d.x())
        }
    }

    fn kind_name(&self) -> &'static str {
        match self.kind {
            ManifestKind::Line => "line",
            ManifestKind::Hyperelliptic => "hyperelliptic",
            ManifestKind::Plane => "plane",
            ManifestKind::Biquadratic => "biquadratic",
        }
    }

    fn require<'a, T>(
        &self,
        v: &'a Option<T>,
        field: &'static str,
    ) -> Result<&'a T, ManifestError> {
        v.as_ref().ok_or(ManifestError::MissingField {
            kind: self.kind_name(),
            field,
        })
    }

    /// Validates the manifest through the family constructors.
    pub fn build(&self) -> Result<Subject, ManifestError> {
        let field = construct_field(self.p, self.k).map_err(CurveError::from)?;
        let p = self.p;
        let subject = match self.kind {
            ManifestKind::Line => Subject::Curve(make_projective_line(&field)),
            ManifestKind::Hyperelliptic => {
                let f = Poly::from_signed(p, self.require(&self.f, "f")?);
                Subject::Curve(make_hyperelliptic(&field, &f)?)
            }
            ManifestKind::Plane => {
                let d = *self.require(&self.d, "d")?;
                let form = PlaneForm::from_dense(p, d, self.require(&self.form, "F")?)?;
                let monomials: Vec<Monomial> = form
                    .terms()
                    .iter()
                    .map(|&(e, c)| Monomial::new(c as i64, e))
                    .collect();
                Subject::Curve(make_smooth_plane(&field, &monomials, d)?)
            }
            ManifestKind::Biquadratic => {
                let f = Poly::from_signed(p, self.require(&self.f, "f")?);
                let g = Poly::from_signed(p, self.require(&self.g, "g")?);
                if let Some(c) = self.certificate {
                    let cert = Certificate {
                        absolutely_irreducible: c.absolutely_irreducible,
                        smooth: c.smooth,
                    };
                    if !cert.is_valid() {
                        return Err(ManifestError::InvalidCertificate);
                    }
                }
                let mut diagram = make_biquadratic(&field, &f, &g)?;
                if let Some(label) = &self.label {
                    diagram.relabel(label);
                }
                return Ok(Subject::Diagram(Box::new(diagram)));
            }
        };
        Ok(match (subject, &self.label) {
            (Subject::Curve(c), Some(label)) => Subject::Curve(c.with_label(label.clone())),
            (s, _) => s,
        })
    }

    /// Reads the manifest as a single curve; a biquadratic manifest gives
    /// its apex `X`.
    pub fn build_curve(&self) -> Result<CurveModel, ManifestError> {
        Ok(match self.build()? {
            Subject::Curve(c) => c,
            Subject::Diagram(d) => d.x().clone(),
        })
    }
}

impl Subject {
    pub fn to_manifest(&self) -> Manifest {
        match self {
            Subject::Curve(c) => Manifest::from_curve(c),
            Subject::Diagram(d) => Manifest::from_diagram(d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_each_kind() {
        let e = Manifest::parse(r#"{"kind":"hyperelliptic","p":3,"k":1,"f":[0,1,0,1]}"#)
            .unwrap()
            .build_curve()
            .unwrap();
        assert_eq!(e.genus(), 1);
        let line = Manifest::parse(r#"{"kind":"line","p":5,"k":1}"#).unwrap();
        assert_eq!(line.build_curve().unwrap().genus(), 0);
        let plane =
            Manifest::parse(r#"{"kind":"plane","p":2,"k":2,"d":3,"F":[1,0,0,0,0,0,0,0,0,1]}"#)
                .unwrap();
        // x^3 + z^3 is a union of lines through (0 : 1 : 0)
        assert!(plane.build().is_err());
        let fermat =
            Manifest::parse(r#"{"kind":"plane","p":2,"k":2,"d":3,"F":[1,0,0,1,0,0,0,0,0,1]}"#)
                .unwrap();
        assert_eq!(fermat.build_curve().unwrap().genus(), 1);
        let diag =
            Manifest::parse(r#"{"kind":"biquadratic","p":3,"k":1,"f":[0,1,0,1],"g":[2,1,1]}"#)
                .unwrap();
        assert!(matches!(diag.build().unwrap(), Subject::Diagram(_)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Manifest::parse("{not json"),
            Err(ManifestError::Syntax(_))
        ));
        assert!(matches!(
            Manifest::parse(r#"{"kind":"hyperelliptic","p":3,"k":1}"#)
                .unwrap()
                .build(),
            Err(ManifestError::MissingField { field: "f", .. })
        ));
        let bad_cert = Manifest::parse(
            r#"{"kind":"biquadratic","p":3,"k":1,"f":[0,1,0,1],"g":[2,1,1],
                "certificate":{"absolutely_irreducible":false,"smooth":true}}"#,
        )
        .unwrap();
        assert_eq!(bad_cert.build(), Err(ManifestError::InvalidCertificate));
        assert!(matches!(
            Manifest::parse(r#"{"kind":"line","p":4,"k":1}"#)
                .unwrap()
                .build(),
            Err(ManifestError::Curve(CurveError::Field(_)))
        ));
    }

    fn round_trip(m: &Manifest) {
        let Ok(first) = m.build() else { return };
        let text = first.to_manifest().to_json();
        let reparsed = Manifest::parse(&text).unwrap();
        let second = reparsed.build().unwrap();
        assert_eq!(first, second);
        assert_eq!(reparsed.to_json(), text);
    }

    proptest! {
        #[test]
        fn hyperelliptic_round_trip(
            p in prop::sample::select(vec![3u64, 5, 7]),
            k in 1usize..=2,
            f in prop::collection::vec(-10i64..10, 2..7),
        ) {
            let m = Manifest { f: Some(f), ..Manifest::blank(ManifestKind::Hyperelliptic, p, k) };
            round_trip(&m);
        }

        #[test]
        fn biquadratic_round_trip(
            p in prop::sample::select(vec![3u64, 5]),
            f in prop::collection::vec(-5i64..5, 2..5),
            g in prop::collection::vec(-5i64..5, 3..6),
        ) {
            let m = Manifest {
                f: Some(f),
                g: Some(g),
                ..Manifest::blank(ManifestKind::Biquadratic, p, 1)
            };
            round_trip(&m);
        }

        #[test]
        fn plane_round_trip(
            p in prop::sample::select(vec![5u64, 7]),
            coeffs in prop::collection::vec(-3i64..3, 10),
        ) {
            let m = Manifest {
                d: Some(3),
                form: Some(coeffs),
                ..Manifest::blank(ManifestKind::Plane, p, 1)
            };
            round_trip(&m);
        }
    }
}
