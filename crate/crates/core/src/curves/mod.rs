//! Explicit curve families over finite fields and exact point counts on
//! their smooth projective models.
//!
//! Four families are supported: the projective line, hyperelliptic curves
//! `y^2 = f(x)` in odd characteristic, smooth plane curves `F(x, y, z) = 0`,
//! and the total space of a biquadratic diagram (see [`cover`]). Defining
//! polynomials always have coefficients in the prime field, so base change to
//! `F_{q^j}` is the constant embedding.

mod count;
pub mod cover;
pub mod manifest;
mod plane;

use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

use crate::finite_field::{FieldError, FieldSpec};
use crate::poly::Poly;

pub use count::{count_points, count_series, hyperelliptic_count_by_pairs};
pub use cover::{
    covers_of, hyperelliptic_cover, make_biquadratic, Certificate, CoverData, CoverKind,
    DiagramData,
};
pub(crate) use plane::dense_exponents;
pub use plane::{Monomial, PlaneForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("hyperelliptic and biquadratic models require odd characteristic")]
    EvenCharacteristic,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("defining polynomial must have degree at least 1")]
    ConstantPolynomial,
    #[error("polynomial coefficients live in F_{found}, expected F_{expected}")]
    CoefficientMismatch { expected: u64, found: u64 },
    #[error("plane polynomial is not homogeneous of degree {0}")]
    NotHomogeneous(u32),
    #[error("singular point {witness} over the degree-{ext_degree} extension")]
    SingularCurve { witness: String, ext_degree: usize },
    #[error("biquadratic data needs deg f odd and deg g even >= 2")]
    DegreeParity,
    #[error("f and g are not coprime")]
    NotCoprime,
    #[error("enumeration of {0} points exceeds the budget")]
    BudgetExceeded(BigInt),
    #[error("operation does not apply to this kind of curve")]
    WrongKind,
    #[error("cover source genus {source_genus} is smaller than target genus {target_genus}")]
    GenusOrder {
        source_genus: u64,
        target_genus: u64,
    },
    #[error("extension degree must be positive")]
    InvalidExtension,
}

/// Maximum number of points a single count may scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(1_000_000)
    }
}

impl Budget {
    /// Default for the singular-point search of plane curves, which scans
    /// x-coordinates only.
    pub const SMOOTHNESS_DEFAULT: Budget = Budget(1 << 23);

    pub fn allows(&self, n: &BigInt) -> bool {
        n <= &BigInt::from(self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveKind {
    ProjectiveLine,
    Hyperelliptic { f: Poly },
    SmoothPlane { form: PlaneForm },
    BiquadraticTotalSpace { f: Poly, g: Poly },
}

impl CurveKind {
    pub fn name(&self) -> &'static str {
        match self {
            CurveKind::ProjectiveLine => "projective_line",
            CurveKind::Hyperelliptic { .. } => "hyperelliptic",
            CurveKind::SmoothPlane { .. } => "smooth_plane",
            CurveKind::BiquadraticTotalSpace { .. } => "biquadratic_total_space",
        }
    }
}

/// A smooth projective curve from one of the built-in families, with its
/// genus computed at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveModel {
    kind: CurveKind,
    base: FieldSpec,
    genus: u64,
    label: String,
}

impl CurveModel {
    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn base(&self) -> &FieldSpec {
        &self.base
    }

    pub fn q(&self) -> &BigInt {
        self.base.order()
    }

    pub fn genus(&self) -> u64 {
        self.genus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

impl fmt::Display for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn check_coefficients(field: &FieldSpec, f: &Poly) -> Result<(), CurveError> {
    if f.modulus() != field.characteristic() {
        return Err(CurveError::CoefficientMismatch {
            expected: field.characteristic(),
            found: f.modulus(),
        });
    }
    Ok(())
}

pub fn make_projective_line(field: &FieldSpec) -> CurveModel {
    CurveModel {
        kind: CurveKind::ProjectiveLine,
        base: field.clone(),
        genus: 0,
        label: format!("P^1 over {field}"),
    }
}

pub(crate) fn hyperelliptic_genus(degree: usize) -> u64 {
    let d = degree as u64;
    if d % 2 == 1 {
        (d - 1) / 2
    } else {
        d / 2 - 1
    }
}

/// `y^2 = f(x)` with `f` squarefree over the prime field, odd characteristic.
pub fn make_hyperelliptic(field: &FieldSpec, f: &Poly) -> Result<CurveModel, CurveError> {
    check_coefficients(field, f)?;
    if !field.is_odd_characteristic() {
        return Err(CurveError::EvenCharacteristic);
    }
    let degree = match f.degree() {
        None => return Err(CurveError::ZeroPolynomial),
        Some(0) => return Err(CurveError::ConstantPolynomial),
        Some(d) => d,
    };
    if !f.is_squarefree() {
        return Err(CurveError::NotSquarefree);
    }
    Ok(CurveModel {
        kind: CurveKind::Hyperelliptic { f: f.clone() },
        base: field.clone(),
        genus: hyperelliptic_genus(degree),
        label: format!("y^2 = {f} over {field}"),
    })
}

/// `F(x, y, z) = 0` for a homogeneous `F` of degree `d`, validated smooth
/// under the default singular-point search budget.
pub fn make_smooth_plane(
    field: &FieldSpec,
    monomials: &[Monomial],
    degree: u32,
) -> Result<CurveModel, CurveError> {
    make_smooth_plane_with_budget(field, monomials, degree, Budget::SMOOTHNESS_DEFAULT)
}

pub fn make_smooth_plane_with_budget(
    field: &FieldSpec,
    monomials: &[Monomial],
    degree: u32,
    budget: Budget,
) -> Result<CurveModel, CurveError> {
    let form = PlaneForm::new(field.characteristic(), degree, monomials)?;
    if let Some((witness, ext_degree)) = plane::find_singular_point(&form, field, budget)? {
        return Err(CurveError::SingularCurve {
            witness,
            ext_degree,
        });
    }
    let d = degree as u64;
    let label = format!("{form} = 0 over {field}");
    Ok(CurveModel {
        kind: CurveKind::SmoothPlane { form },
        base: field.clone(),
        genus: (d - 1) * (d.saturating_sub(2)) / 2,
        label,
    })
}

/// `N_j = #X(F_{q^j})` for `j = 1..m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointCountSeries {
    q: BigInt,
    counts: Vec<BigInt>,
}

impl PointCountSeries {
    /// Panics on a negative count.
    pub fn new(q: BigInt, counts: Vec<BigInt>) -> Self {
        assert!(
            counts.iter().all(|n| !n.is_negative()),
            "point counts are nonnegative"
        );
        PointCountSeries { q, counts }
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn counts(&self) -> &[BigInt] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `N_j`, 1-based.
    pub fn get(&self, j: usize) -> Option<&BigInt> {
        j.checked_sub(1).and_then(|i| self.counts.get(i))
    }

    /// `N_j >= N_d` whenever `d | j`.
    pub fn is_divisibility_monotone(&self) -> bool {
        let m = self.counts.len();
        (1..=m).all(|j| {
            (1..j)
                .filter(|d| j % d == 0)
                .all(|d| self.counts[j - 1] >= self.counts[d - 1])
        })
    }

    /// `(N_j - q^j - 1)^2 <= 4 g^2 q^j` for every `j`.
    pub fn satisfies_weil(&self, genus: u64) -> bool {
        let four_g2 = BigInt::from(4u64 * genus * genus);
        self.counts.iter().enumerate().all(|(i, n)| {
            let qj = self.q.pow(i as u32 + 1);
            let dev: BigInt = n - &qj - 1;
            &dev * &dev <= &four_g2 * &qj
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::construct_field;

    fn f3() -> FieldSpec {
        construct_field(3, 1).unwrap()
    }

    #[test]
    fn hyperelliptic_genus_examples() {
        let e = make_hyperelliptic(&f3(), &Poly::from_signed(3, &[0, 1, 0, 1])).unwrap();
        assert_eq!(e.genus(), 1);
        let c = make_hyperelliptic(&f3(), &Poly::from_signed(3, &[2, 1, 1])).unwrap();
        assert_eq!(c.genus(), 0);
        assert_eq!(
            make_hyperelliptic(&f3(), &Poly::from_signed(3, &[0, 0, 1, 1])).unwrap_err(),
            CurveError::NotSquarefree
        );
        assert_eq!(
            make_hyperelliptic(&f3(), &Poly::zero(3)).unwrap_err(),
            CurveError::ZeroPolynomial
        );
        let f2 = construct_field(2, 1).unwrap();
        assert_eq!(
            make_hyperelliptic(&f2, &Poly::from_signed(2, &[0, 1, 0, 1])).unwrap_err(),
            CurveError::EvenCharacteristic
        );
        assert!(matches!(
            make_hyperelliptic(&f3(), &Poly::from_signed(5, &[0, 1, 0, 1])),
            Err(CurveError::CoefficientMismatch { .. })
        ));
    }

    #[test]
    fn projective_line_genus() {
        assert_eq!(make_projective_line(&f3()).genus(), 0);
    }

    #[test]
    fn plane_examples() {
        let fermat = |d: u32| {
            vec![
                Monomial::new(1, [d, 0, 0]),
                Monomial::new(1, [0, d, 0]),
                Monomial::new(1, [0, 0, d]),
            ]
        };
        let f4 = construct_field(2, 2).unwrap();
        assert_eq!(make_smooth_plane(&f4, &fermat(3), 3).unwrap().genus(), 1);
        match make_smooth_plane(&f3(), &fermat(3), 3) {
            Err(CurveError::SingularCurve { ext_degree, .. }) => assert_eq!(ext_degree, 1),
            other => panic!("expected SingularCurve, got {other:?}"),
        }
        let f5 = construct_field(5, 1).unwrap();
        assert_eq!(make_smooth_plane(&f5, &fermat(4), 4).unwrap().genus(), 3);
        let mixed = vec![Monomial::new(1, [3, 0, 0]), Monomial::new(1, [0, 2, 0])];
        assert_eq!(
            make_smooth_plane(&f5, &mixed, 3).unwrap_err(),
            CurveError::NotHomogeneous(3)
        );
    }

    #[test]
    fn series_invariants_detect_violations() {
        let s = PointCountSeries::new(BigInt::from(3), vec![4.into(), 16.into()]);
        assert!(s.is_divisibility_monotone());
        assert!(s.satisfies_weil(1));
        assert!(!s.satisfies_weil(0));
        let bad = PointCountSeries::new(BigInt::from(3), vec![5.into(), 4.into()]);
        assert!(!bad.is_divisibility_monotone());
    }
}
