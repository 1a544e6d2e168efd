//! Covers produced by the built-in constructions: a hyperelliptic curve over
//! the line, and the biquadratic square
//!
//! ```text
//!        X
//!      /   \
//!    Y1     Y2
//!      \   /
//!        Z = P^1
//! ```
//!
//! with `Y1: y1^2 = f`, `Y2: y2^2 = g` and `X` their fiber product over the
//! `x`-line. The third quadratic subcover is `Y3: y^2 = f*g`.

use super::{
    check_coefficients, hyperelliptic_genus, make_hyperelliptic, make_projective_line, CurveError,
    CurveKind, CurveModel,
};
use crate::finite_field::FieldSpec;
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoverKind {
    HyperellipticOverLine,
    DiagramXOverY1,
    DiagramXOverY2,
    DiagramY1OverZ,
    DiagramY2OverZ,
    DiagramXOverZ,
}

impl CoverKind {
    pub fn degree(self) -> u64 {
        match self {
            CoverKind::DiagramXOverZ => 4,
            _ => 2,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            CoverKind::HyperellipticOverLine => "hyperelliptic/line",
            CoverKind::DiagramXOverY1 => "diagram X->Y1",
            CoverKind::DiagramXOverY2 => "diagram X->Y2",
            CoverKind::DiagramY1OverZ => "diagram Y1->Z",
            CoverKind::DiagramY2OverZ => "diagram Y2->Z",
            CoverKind::DiagramXOverZ => "diagram X->Z",
        }
    }
}

/// A finite morphism `source -> target` of the given degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverData {
    source: CurveModel,
    target: CurveModel,
    degree: u64,
    kind: CoverKind,
}

impl CoverData {
    fn new(source: &CurveModel, target: &CurveModel, kind: CoverKind) -> Result<Self, CurveError> {
        if source.genus() < target.genus() {
            return Err(CurveError::GenusOrder {
                source_genus: source.genus(),
                target_genus: target.genus(),
            });
        }
        Ok(CoverData {
            source: source.clone(),
            target: target.clone(),
            degree: kind.degree(),
            kind,
        })
    }

    pub fn source(&self) -> &CurveModel {
        &self.source
    }

    pub fn target(&self) -> &CurveModel {
        &self.target
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn kind(&self) -> CoverKind {
        self.kind
    }

    pub fn label(&self) -> String {
        format!("{} -> {}", self.source, self.target)
    }
}

/// Hypotheses of the diagram bound: the fiber product is absolutely
/// irreducible and smooth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certificate {
    pub absolutely_irreducible: bool,
    pub smooth: bool,
}

impl Certificate {
    pub fn is_valid(&self) -> bool {
        self.absolutely_irreducible && self.smooth
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramData {
    x: CurveModel,
    y1: CurveModel,
    y2: CurveModel,
    z: CurveModel,
    y3: CurveModel,
    edges: [CoverData; 4],
    certificate: Certificate,
}

impl DiagramData {
    pub fn x(&self) -> &CurveModel {
        &self.x
    }

    pub fn y1(&self) -> &CurveModel {
        &self.y1
    }

    pub fn y2(&self) -> &CurveModel {
        &self.y2
    }

    pub fn z(&self) -> &CurveModel {
        &self.z
    }

    /// `y^2 = f*g`.
    pub fn y3(&self) -> &CurveModel {
        &self.y3
    }

    /// `X -> Y1`, `X -> Y2`, `Y1 -> Z`, `Y2 -> Z`.
    pub fn edges(&self) -> &[CoverData; 4] {
        &self.edges
    }

    /// The composite `X -> Z` of degree 4.
    pub fn x_over_z(&self) -> CoverData {
        CoverData {
            source: self.x.clone(),
            target: self.z.clone(),
            degree: 4,
            kind: CoverKind::DiagramXOverZ,
        }
    }

    pub fn certificate(&self) -> Certificate {
        self.certificate
    }

    pub fn label(&self) -> &str {
        self.x.label()
    }

    pub(crate) fn relabel(&mut self, label: &str) {
        self.x.label = label.to_string();
    }

    /// `(f, g)`.
    pub fn polynomials(&self) -> (&Poly, &Poly) {
        match self.x.kind() {
            CurveKind::BiquadraticTotalSpace { f, g } => (f, g),
            _ => unreachable!("diagram apex is a biquadratic total space"),
        }
    }

    /// `(gX, gY1, gY2, gZ)`.
    pub fn genera(&self) -> [u64; 4] {
        [
            self.x.genus(),
            self.y1.genus(),
            self.y2.genus(),
            self.z.genus(),
        ]
    }
}

fn require_nonconstant(f: &Poly) -> Result<(), CurveError> {
    match f.degree() {
        None => Err(CurveError::ZeroPolynomial),
        Some(0) => Err(CurveError::ConstantPolynomial),
        Some(_) => Ok(()),
    }
}

/// The biquadratic square for `(f, g)` over `field`.
///
/// Requires odd characteristic, `f` and `g` squarefree, `deg f` odd,
/// `deg g` even and at least 2, and `gcd(f, g) = 1`. Under these conditions
/// the branch loci of `Y1 -> Z` and `Y2 -> Z` are disjoint (infinity
/// ramifies only in `Y1`), so the fiber product is smooth and absolutely
/// irreducible.
pub fn make_biquadratic(field: &FieldSpec, f: &Poly, g: &Poly) -> Result<DiagramData, CurveError> {
    check_coefficients(field, f)?;
    check_coefficients(field, g)?;
    if !field.is_odd_characteristic() {
        return Err(CurveError::EvenCharacteristic);
    }
    require_nonconstant(f)?;
    require_nonconstant(g)?;
    if !f.is_squarefree() || !g.is_squarefree() {
        return Err(CurveError::NotSquarefree);
    }
    let (df, dg) = (f.degree().unwrap(), g.degree().unwrap());
    if df % 2 == 0 || dg % 2 == 1 {
        return Err(CurveError::DegreeParity);
    }
    if !f.gcd(g).is_constant() {
        return Err(CurveError::NotCoprime);
    }

    let z = make_projective_line(field);
    let y1 = make_hyperelliptic(field, f)?;
    let y2 = make_hyperelliptic(field, g)?;
    let fg = f.mul(g);
    let y3 = make_hyperelliptic(field, &fg)?;
    let genus = y1.genus() + y2.genus() + hyperelliptic_genus(df + dg);
    let x = CurveModel {
        kind: CurveKind::BiquadraticTotalSpace {
            f: f.clone(),
            g: g.clone(),
        },
        base: field.clone(),
        genus,
        label: format!("y1^2 = {f}, y2^2 = {g} over {field}"),
    };
    let edges = [
        CoverData::new(&x, &y1, CoverKind::DiagramXOverY1)?,
        CoverData::new(&x, &y2, CoverKind::DiagramXOverY2)?,
        CoverData::new(&y1, &z, CoverKind::DiagramY1OverZ)?,
        CoverData::new(&y2, &z, CoverKind::DiagramY2OverZ)?,
    ];
    Ok(DiagramData {
        x,
        y1,
        y2,
        z,
        y3,
        edges,
        certificate: Certificate {
            absolutely_irreducible: true,
            smooth: true,
        },
    })
}

pub fn covers_of(d: &DiagramData) -> [CoverData; 4] {
    d.edges.clone()
}

/// The degree-2 map `(x, y) -> x` onto the line.
pub fn hyperelliptic_cover(c: &CurveModel) -> Result<CoverData, CurveError> {
    if !matches!(c.kind(), CurveKind::Hyperelliptic { .. }) {
        return Err(CurveError::WrongKind);
    }
    CoverData::new(
        c,
        &make_projective_line(c.base()),
        CoverKind::HyperellipticOverLine,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{count_points, Budget};
    use crate::finite_field::construct_field;
    use num_bigint::BigInt;

    fn f3() -> FieldSpec {
        construct_field(3, 1).unwrap()
    }

    fn example() -> DiagramData {
        make_biquadratic(
            &f3(),
            &Poly::from_signed(3, &[0, 1, 0, 1]),
            &Poly::from_signed(3, &[2, 1, 1]),
        )
        .unwrap()
    }

    #[test]
    fn example_genera_and_degrees() {
        let d = example();
        assert_eq!(d.genera(), [3, 1, 0, 0]);
        assert_eq!(d.y3().genus(), 2);
        let degrees: Vec<u64> = covers_of(&d).iter().map(|e| e.degree()).collect();
        assert_eq!(degrees, vec![2, 2, 2, 2]);
        assert_eq!(d.x_over_z().degree(), 4);
        assert!(d.certificate().is_valid());
        assert_eq!(count_points(d.x(), 1, Budget::default()).unwrap(), 2.into());
    }

    #[test]
    fn validation_errors() {
        let e = Poly::from_signed(3, &[0, 1, 0, 1]);
        assert_eq!(
            make_biquadratic(&f3(), &e, &e).unwrap_err(),
            CurveError::DegreeParity
        );
        assert_eq!(
            make_biquadratic(&f3(), &e, &Poly::from_signed(3, &[0, 0, 1, 1])).unwrap_err(),
            CurveError::NotSquarefree
        );
        // x^3 + x = x (x^2 + 1) shares x with x^2 + x
        assert_eq!(
            make_biquadratic(&f3(), &e, &Poly::from_signed(3, &[0, 1, 1])).unwrap_err(),
            CurveError::NotCoprime
        );
        let f2 = construct_field(2, 1).unwrap();
        assert_eq!(
            make_biquadratic(
                &f2,
                &Poly::from_signed(2, &[0, 1]),
                &Poly::from_signed(2, &[1, 1, 1])
            )
            .unwrap_err(),
            CurveError::EvenCharacteristic
        );
    }

    #[test]
    fn hyperelliptic_cover_kinds() {
        let e = make_hyperelliptic(&f3(), &Poly::from_signed(3, &[0, 1, 0, 1])).unwrap();
        let c = hyperelliptic_cover(&e).unwrap();
        assert_eq!(c.degree(), 2);
        assert_eq!(c.target().genus(), 0);
        assert_eq!(
            hyperelliptic_cover(&make_projective_line(&f3())).unwrap_err(),
            CurveError::WrongKind
        );
    }

    #[test]
    fn trace_identity_on_example() {
        let d = example();
        for j in 1..=4 {
            let n = |c: &CurveModel| count_points(c, j, Budget::default()).unwrap();
            let qj1 = BigInt::from(3).pow(j as u32) + 1;
            assert_eq!(
                n(d.x()),
                n(d.y1()) + n(d.y2()) + n(d.y3()) - 2 * qj1,
                "j={j}"
            );
        }
    }
}
