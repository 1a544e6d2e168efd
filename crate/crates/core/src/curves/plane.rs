//! Homogeneous ternary forms and the singular-point search for plane curves.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use super::{Budget, CurveError};
use crate::finite_field::tables::{tables_for, Code, LogTables, ZERO};
use crate::finite_field::FieldSpec;
use crate::poly::Poly;

/// `coeff * x^a * y^b * z^c`, exponents stored as `[a, b, c]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub coeff: i64,
    pub exps: [u32; 3],
}

impl Monomial {
    pub fn new(coeff: i64, exps: [u32; 3]) -> Self {
        Monomial { coeff, exps }
    }

    fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

/// A nonzero homogeneous form over `F_p`, terms combined and sorted by
/// exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlaneForm {
    p: u64,
    degree: u32,
    /// (exponents, coefficient in [1, p))
    terms: Vec<([u32; 3], u64)>,
}

impl PlaneForm {
    pub fn new(p: u64, degree: u32, monomials: &[Monomial]) -> Result<Self, CurveError> {
        if degree == 0 {
            return Err(CurveError::ConstantPolynomial);
        }
        if monomials.iter().any(|m| m.degree() != degree) {
            return Err(CurveError::NotHomogeneous(degree));
        }
        let terms = combine(
            p,
            monomials
                .iter()
                .map(|m| (m.exps, m.coeff.rem_euclid(p as i64) as u64)),
        );
        if terms.is_empty() {
            return Err(CurveError::ZeroPolynomial);
        }
        Ok(PlaneForm { p, degree, terms })
    }

    /// Dense coefficients over `x^a y^b z^(d-a-b)` for `a = 0..=d`, `b = 0..=d-a`.
    pub fn from_dense(p: u64, degree: u32, coeffs: &[i64]) -> Result<Self, CurveError> {
        let monos = dense_exponents(degree);
        if coeffs.len() != monos.len() {
            return Err(CurveError::NotHomogeneous(degree));
        }
        let list: Vec<Monomial> = monos
            .iter()
            .zip(coeffs)
            .map(|(&e, &c)| Monomial::new(c, e))
            .collect();
        PlaneForm::new(p, degree, &list)
    }

    pub fn to_dense(&self) -> Vec<u64> {
        let lookup: BTreeMap<[u32; 3], u64> = self.terms.iter().copied().collect();
        dense_exponents(self.degree)
            .iter()
            .map(|e| lookup.get(e).copied().unwrap_or(0))
            .collect()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn terms(&self) -> &[([u32; 3], u64)] {
        &self.terms
    }

    /// Formal partial derivative in variable `var` (0 = x, 1 = y, 2 = z);
    /// may be empty.
    pub(crate) fn partial(&self, var: usize) -> Vec<([u32; 3], u64)> {
        let p = self.p;
        combine(
            p,
            self.terms
                .iter()
                .filter(|(e, _)| e[var] > 0)
                .map(|&(e, c)| {
                    let mut e2 = e;
                    e2[var] -= 1;
                    (e2, (e[var] as u64 % p) * c % p)
                }),
        )
    }
}

pub(crate) fn dense_exponents(degree: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=degree {
        for b in 0..=degree - a {
            out.push([a, b, degree - a - b]);
        }
    }
    out
}

fn combine(p: u64, terms: impl Iterator<Item = ([u32; 3], u64)>) -> Vec<([u32; 3], u64)> {
    let mut acc: BTreeMap<[u32; 3], u64> = BTreeMap::new();
    for (e, c) in terms {
        let slot = acc.entry(e).or_insert(0);
        *slot = (*slot + c) % p;
    }
    acc.into_iter().filter(|&(_, c)| c != 0).collect()
}

impl fmt::Display for PlaneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut parts = Vec::new();
            if *c != 1 || e.iter().all(|&x| x == 0) {
                parts.push(c.to_string());
            }
            for (name, &exp) in ["x", "y", "z"].iter().zip(e) {
                match exp {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{exp}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Terms with prime-field coefficients encoded for a specific table.
struct EncodedTerms(Vec<([u32; 3], Code)>);

impl EncodedTerms {
    fn new(t: &LogTables, terms: &[([u32; 3], u64)]) -> Self {
        EncodedTerms(terms.iter().map(|&(e, c)| (e, t.prime_code(c))).collect())
    }

    /// Coefficients in `Y` of the form at `(x0, Y, 1)`.
    fn in_y(&self, t: &LogTables, x0: Code, max_deg: usize) -> Vec<Code> {
        let mut out = vec![ZERO; max_deg + 1];
        for &(e, c) in &self.0 {
            let term = t.mul(c, t.pow(x0, e[0] as u64));
            let slot = &mut out[e[1] as usize];
            *slot = t.add(*slot, term);
        }
        trim(&mut out);
        out
    }
}

fn trim(v: &mut Vec<Code>) {
    while v.last() == Some(&ZERO) {
        v.pop();
    }
}

fn rem_codes(t: &LogTables, mut a: Vec<Code>, b: &[Code]) -> Vec<Code> {
    let db = b.len() - 1;
    let inv_lead = t.inv(b[db]);
    while a.len() > db {
        let top = a.len() - 1;
        let c = t.mul(a[top], inv_lead);
        for (i, &bc) in b.iter().enumerate() {
            let idx = top - db + i;
            a[idx] = t.sub(a[idx], t.mul(c, bc));
        }
        trim(&mut a);
    }
    a
}

/// Gcd over `F_{q^j}` up to a unit; empty means both inputs were zero.
fn gcd_codes(t: &LogTables, mut a: Vec<Code>, mut b: Vec<Code>) -> Vec<Code> {
    while !b.is_empty() {
        let r = rem_codes(t, a, &b);
        a = b;
        b = r;
    }
    a
}

fn eval_codes(t: &LogTables, poly: &[Code], y: Code) -> Code {
    poly.iter()
        .rev()
        .fold(ZERO, |acc, &c| t.add(t.mul(acc, y), c))
}

fn eval_terms_prime(p: u64, terms: &[([u32; 3], u64)], point: [u64; 3]) -> u64 {
    terms.iter().fold(0, |acc, &(e, c)| {
        let mut v = c;
        for i in 0..3 {
            for _ in 0..e[i] {
                v = v * point[i] % p;
            }
        }
        (acc + v) % p
    })
}

/// Restriction to the line `z = 0`, `y = 1`, as a polynomial in `x`.
fn on_line_at_infinity(p: u64, terms: &[([u32; 3], u64)]) -> Poly {
    let deg = terms.iter().map(|(e, _)| e[0] as usize).max().unwrap_or(0);
    let mut coeffs = vec![0u64; deg + 1];
    for &(e, c) in terms.iter().filter(|(e, _)| e[2] == 0) {
        coeffs[e[0] as usize] = (coeffs[e[0] as usize] + c) % p;
    }
    Poly::new(p, coeffs)
}

/// Smallest `j` such that `h` has a root in `F_{q^j}`, `q = p^k`.
fn root_extension_degree(h: &Poly, k: usize) -> usize {
    let p = h.modulus();
    let x = Poly::x(p);
    let mut frob = x.clone();
    for j in 1.. {
        for _ in 0..k {
            frob = h.pow_mod(&frob, p);
        }
        if !h.gcd(&frob.sub(&x)).is_constant() {
            return j;
        }
    }
    unreachable!()
}

/// Searches for a singular point of `F = 0`.
///
/// Points on `z = 0` are handled exactly over the algebraic closure by gcds
/// over `F_p`. Affine points are found by scanning every x-coordinate in
/// `F_{q^j}` for `j <= (d-1)^2` (one representative per Frobenius orbit) and
/// testing whether `F(x0, Y, 1)`, `F_x(x0, Y, 1)`, `F_y(x0, Y, 1)` share a
/// root. Returns a printable witness and the extension degree it was found in.
pub(crate) fn find_singular_point(
    form: &PlaneForm,
    field: &FieldSpec,
    budget: Budget,
) -> Result<Option<(String, usize)>, CurveError> {
    let p = form.p;
    let terms = &form.terms;
    let partials = [form.partial(0), form.partial(1), form.partial(2)];

    // (1 : 0 : 0)
    if std::iter::once(terms.as_slice())
        .chain(partials.iter().map(Vec::as_slice))
        .all(|t| eval_terms_prime(p, t, [1, 0, 0]) == 0)
    {
        return Ok(Some(("(1 : 0 : 0)".to_string(), 1)));
    }
    // (x : 1 : 0)
    let h = std::iter::once(terms.as_slice())
        .chain(partials.iter().map(Vec::as_slice))
        .map(|t| on_line_at_infinity(p, t))
        .fold(Poly::zero(p), |acc, g| acc.gcd(&g));
    if h.is_zero() {
        return Ok(Some(("(0 : 1 : 0)".to_string(), 1)));
    }
    if !h.is_constant() {
        let j = root_extension_degree(&h, field.degree());
        return Ok(Some((format!("(x : 1 : 0) with {h} = 0"), j)));
    }

    let max_j = ((form.degree - 1) * (form.degree - 1)) as usize;
    let q = field.order();
    let cost: BigInt = (1..=max_j).map(|j| q.pow(j as u32)).sum();
    if !budget.allows(&cost) {
        return Err(CurveError::BudgetExceeded(cost));
    }
    let d = form.degree as usize;
    for j in 1..=max_j {
        let ext = field.extension(j)?;
        let t = tables_for(&ext)?;
        let f0 = EncodedTerms::new(&t, terms);
        let fx = EncodedTerms::new(&t, &partials[0]);
        let fy = EncodedTerms::new(&t, &partials[1]);
        let qm1 = t.order() - 1;
        let qb = field.order_u64().expect("scan is budget-bounded");
        // logs n with g^n in a proper subfield F_{q^i}
        let strides: Vec<u64> = (1..j)
            .filter(|i| j % i == 0)
            .map(|i| qm1 / (qb.pow(i as u32) - 1))
            .collect();
        let candidates = std::iter::once(ZERO).filter(|_| j == 1).chain(
            (0..qm1)
                .filter(|&n| strides.iter().all(|s| n % s != 0) && t.is_orbit_representative(n))
                .map(|n| 1 + n as Code),
        );
        for x0 in candidates {
            let g = gcd_codes(&t, f0.in_y(&t, x0, d), fx.in_y(&t, x0, d));
            let g = gcd_codes(&t, g, fy.in_y(&t, x0, d));
            if g.len() == 1 {
                continue;
            }
            let xs = t.to_element(&ext, x0);
            let y0 = t
                .all_codes()
                .find(|&y| g.is_empty() || eval_codes(&t, &g, y) == ZERO);
            let witness = match y0 {
                Some(y) => format!("({xs} : {} : 1)", t.to_element(&ext, y)),
                None => format!("({xs} : y : 1) with y algebraic over F_{}", t.order()),
            };
            return Ok(Some((witness, j)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::construct_field;

    #[test]
    fn dense_round_trip() {
        let form = PlaneForm::from_dense(5, 3, &[1, 0, 0, 1, 0, 0, 0, 0, 0, 1]).unwrap();
        assert_eq!(form.to_dense(), vec![1, 0, 0, 1, 0, 0, 0, 0, 0, 1]);
        assert_eq!(form.to_string(), "x^3 + y^3 + z^3");
    }

    #[test]
    fn nodal_cubic_is_singular() {
        // y^2 z = x^3 + x^2 z has a node at (0 : 0 : 1)
        let f5 = construct_field(5, 1).unwrap();
        let form = PlaneForm::new(
            5,
            3,
            &[
                Monomial::new(1, [0, 2, 1]),
                Monomial::new(-1, [3, 0, 0]),
                Monomial::new(-1, [2, 0, 1]),
            ],
        )
        .unwrap();
        let (w, j) = find_singular_point(&form, &f5, Budget::SMOOTHNESS_DEFAULT)
            .unwrap()
            .unwrap();
        assert_eq!((w.as_str(), j), ("(0 : 0 : 1)", 1));
    }

    #[test]
    fn singular_points_at_infinity_over_extension() {
        // z(x^2 + y^2) over F_3: singular at (±i : 1 : 0), defined over F_9
        let f3 = construct_field(3, 1).unwrap();
        let form = PlaneForm::new(
            3,
            3,
            &[Monomial::new(1, [2, 0, 1]), Monomial::new(1, [0, 2, 1])],
        )
        .unwrap();
        let (_, j) = find_singular_point(&form, &f3, Budget::SMOOTHNESS_DEFAULT)
            .unwrap()
            .unwrap();
        assert_eq!(j, 2);
    }

    #[test]
    fn affine_singularity_over_extension() {
        // (x^2 + z^2)^2 + y^3 z + y^4 over F_3: only singular at (±i : 0 : 1)
        let f3 = construct_field(3, 1).unwrap();
        let form = PlaneForm::new(
            3,
            4,
            &[
                Monomial::new(1, [4, 0, 0]),
                Monomial::new(2, [2, 0, 2]),
                Monomial::new(1, [0, 0, 4]),
                Monomial::new(1, [0, 3, 1]),
                Monomial::new(1, [0, 4, 0]),
            ],
        )
        .unwrap();
        let (w, j) = find_singular_point(&form, &f3, Budget::SMOOTHNESS_DEFAULT)
            .unwrap()
            .unwrap();
        assert_eq!(j, 2, "witness {w}");
        assert!(w.ends_with(": 0 : 1)"), "witness {w}");
    }

    #[test]
    fn smooth_quartic_passes() {
        let f5 = construct_field(5, 1).unwrap();
        let form = PlaneForm::new(
            5,
            4,
            &[
                Monomial::new(1, [4, 0, 0]),
                Monomial::new(1, [0, 4, 0]),
                Monomial::new(1, [0, 0, 4]),
            ],
        )
        .unwrap();
        assert_eq!(
            find_singular_point(&form, &f5, Budget::SMOOTHNESS_DEFAULT).unwrap(),
            None
        );
    }
}
