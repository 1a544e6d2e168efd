//! Brute-force point counts on the smooth projective models.

use num_bigint::BigInt;
use rayon::prelude::*;

use super::plane::PlaneForm;
use super::{Budget, CurveError, CurveKind, CurveModel, PointCountSeries};
use crate::finite_field::tables::{tables_for, Code, LogTables, ZERO};
use crate::finite_field::FieldSpec;
use crate::poly::Poly;

/// Chunk size for splitting a scan across threads. Sums of integers are
/// order-independent, so the result equals the serial scan.
const CHUNK: u32 = 1 << 14;

fn encode(t: &LogTables, f: &Poly) -> Vec<Code> {
    f.coeffs().iter().map(|&c| t.prime_code(c)).collect()
}

fn horner(t: &LogTables, coeffs: &[Code], x: Code) -> Code {
    coeffs
        .iter()
        .rev()
        .fold(ZERO, |acc, &c| t.add(t.mul(acc, x), c))
}

fn par_sum(t: &LogTables, per_x: impl Fn(Code) -> u64 + Sync) -> u64 {
    let q = t.order() as u32;
    (0..q.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(q);
            (lo..hi).map(&per_x).sum::<u64>()
        })
        .sum()
}

fn extension_tables(base: &FieldSpec, j: usize) -> Result<std::sync::Arc<LogTables>, CurveError> {
    let ext = base.extension(j)?;
    Ok(tables_for(&ext)?)
}

/// Points at infinity of `y^2 = f(x)`: one if `deg f` is odd, otherwise two
/// or none according to whether the leading coefficient is a square.
fn hyperelliptic_infinity(t: &LogTables, f: &Poly) -> u64 {
    let deg = f.degree().expect("nonzero f");
    if deg % 2 == 1 {
        1
    } else if t.is_nonzero_square(t.prime_code(f.leading())) {
        2
    } else {
        0
    }
}

fn count_hyperelliptic(t: &LogTables, f: &Poly) -> u64 {
    let fc = encode(t, f);
    let affine = par_sum(t, |x| t.sqrt_count(horner(t, &fc, x)));
    affine + hyperelliptic_infinity(t, f)
}

/// Affine pairs `(y1, y2)` over each `x`, plus the two points over infinity
/// when infinity splits in `y2^2 = g`. Infinity ramifies in `y1^2 = f`
/// (odd degree), and the points of X over it are the ramification points
/// above the points at infinity of `y2^2 = g`.
fn count_biquadratic(t: &LogTables, f: &Poly, g: &Poly) -> u64 {
    let fc = encode(t, f);
    let gc = encode(t, g);
    let affine = par_sum(t, |x| {
        let a = t.sqrt_count(horner(t, &fc, x));
        if a == 0 {
            0
        } else {
            a * t.sqrt_count(horner(t, &gc, x))
        }
    });
    let at_infinity = if t.is_nonzero_square(t.prime_code(g.leading())) {
        2
    } else {
        0
    };
    affine + at_infinity
}

/// Projective solutions through the representatives `(1:y:z)`, `(0:1:z)`,
/// `(0:0:1)`.
fn count_plane(t: &LogTables, form: &PlaneForm) -> u64 {
    let d = form.degree() as usize;
    let terms: Vec<([u32; 3], Code)> = form
        .terms()
        .iter()
        .map(|&(e, c)| (e, t.prime_code(c)))
        .collect();

    // (1 : y : z): for each y, a polynomial in z
    let chart_x = par_sum(t, |y| {
        let mut in_z = vec![ZERO; d + 1];
        for &(e, c) in &terms {
            let slot = &mut in_z[e[2] as usize];
            *slot = t.add(*slot, t.mul(c, t.pow(y, e[1] as u64)));
        }
        t.all_codes()
            .filter(|&z| horner(t, &in_z, z) == ZERO)
            .count() as u64
    });

    // (0 : 1 : z)
    let mut in_z = vec![ZERO; d + 1];
    for &(e, c) in terms.iter().filter(|(e, _)| e[0] == 0) {
        in_z[e[2] as usize] = t.add(in_z[e[2] as usize], c);
    }
    let chart_y = t
        .all_codes()
        .filter(|&z| horner(t, &in_z, z) == ZERO)
        .count() as u64;

    // (0 : 0 : 1)
    let corner = terms
        .iter()
        .filter(|(e, _)| e[2] as usize == d)
        .fold(ZERO, |acc, &(_, c)| t.add(acc, c));
    chart_x + chart_y + u64::from(corner == ZERO)
}

/// `#X(F_{q^j})` on the smooth projective model.
pub fn count_points(curve: &CurveModel, j: usize, budget: Budget) -> Result<BigInt, CurveError> {
    if j < 1 {
        return Err(CurveError::InvalidExtension);
    }
    let qj = curve.q().pow(j as u32);
    let scanned = match curve.kind() {
        CurveKind::ProjectiveLine => return Ok(qj + 1),
        CurveKind::SmoothPlane { .. } => &qj * &qj + &qj + 1,
        _ => qj.clone(),
    };
    if !budget.allows(&scanned) {
        return Err(CurveError::BudgetExceeded(scanned));
    }
    let t = extension_tables(curve.base(), j)?;
    let n = match curve.kind() {
        CurveKind::ProjectiveLine => unreachable!(),
        CurveKind::Hyperelliptic { f } => count_hyperelliptic(&t, f),
        CurveKind::SmoothPlane { form } => count_plane(&t, form),
        CurveKind::BiquadraticTotalSpace { f, g } => count_biquadratic(&t, f, g),
    };
    Ok(BigInt::from(n))
}

/// `N_1..N_m`.
pub fn count_series(
    curve: &CurveModel,
    m: usize,
    budget: Budget,
) -> Result<PointCountSeries, CurveError> {
    let counts = (1..=m)
        .map(|j| count_points(curve, j, budget))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PointCountSeries::new(curve.q().clone(), counts))
}

/// Reference count of `y^2 = f(x)` by testing every affine pair `(x, y)`
/// with coefficient arithmetic, independent of the log tables.
pub fn hyperelliptic_count_by_pairs(curve: &CurveModel, j: usize) -> Result<BigInt, CurveError> {
    let CurveKind::Hyperelliptic { f } = curve.kind() else {
        return Err(CurveError::WrongKind);
    };
    let ext = curve.base().extension(j)?;
    let elems = ext.enumerate_elements()?;
    let coeffs: Vec<_> = f.coeffs().iter().map(|&c| ext.from_int(c as i64)).collect();
    let mut affine = 0u64;
    for x in &elems {
        let fx = coeffs
            .iter()
            .rev()
            .fold(ext.zero(), |acc, c| &(&acc * x) + c);
        affine += elems.iter().filter(|y| *y * *y == fx).count() as u64;
    }
    let deg = f.degree().expect("nonzero f");
    let infinity = if deg % 2 == 1 {
        1
    } else if ext.from_int(f.leading() as i64).is_square()? {
        2
    } else {
        0
    };
    Ok(BigInt::from(affine + infinity))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{make_hyperelliptic, make_projective_line, make_smooth_plane, Monomial};
    use crate::finite_field::construct_field;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn line_counts() {
        let f3 = construct_field(3, 1).unwrap();
        let line = make_projective_line(&f3);
        assert_eq!(count_points(&line, 1, Budget::default()).unwrap(), 4.into());
        let f9 = construct_field(3, 2).unwrap();
        assert_eq!(
            count_points(&make_projective_line(&f9), 1, Budget::default()).unwrap(),
            10.into()
        );
        assert_eq!(
            count_series(&line, 3, Budget::default()).unwrap().counts(),
            ints(&[4, 10, 28]).as_slice()
        );
    }

    #[test]
    fn elliptic_counts() {
        let f3 = construct_field(3, 1).unwrap();
        let e = make_hyperelliptic(&f3, &Poly::from_signed(3, &[0, 1, 0, 1])).unwrap();
        assert_eq!(count_points(&e, 1, Budget::default()).unwrap(), 4.into());
        assert_eq!(
            count_series(&e, 4, Budget::default()).unwrap().counts(),
            ints(&[4, 16, 28, 64]).as_slice()
        );
        let conic = make_hyperelliptic(&f3, &Poly::from_signed(3, &[2, 1, 1])).unwrap();
        assert_eq!(
            count_series(&conic, 2, Budget::default()).unwrap().counts(),
            ints(&[4, 10]).as_slice()
        );
    }

    #[test]
    fn fermat_cubic_over_f4() {
        let f4 = construct_field(2, 2).unwrap();
        let c = make_smooth_plane(
            &f4,
            &[
                Monomial::new(1, [3, 0, 0]),
                Monomial::new(1, [0, 3, 0]),
                Monomial::new(1, [0, 0, 3]),
            ],
            3,
        )
        .unwrap();
        assert_eq!(count_points(&c, 1, Budget::default()).unwrap(), 9.into());
    }

    #[test]
    fn budget_is_enforced() {
        let f7 = construct_field(7, 1).unwrap();
        let e = make_hyperelliptic(&f7, &Poly::from_signed(7, &[1, 1, 0, 1])).unwrap();
        assert_eq!(
            count_points(&e, 8, Budget::default()).unwrap_err(),
            CurveError::BudgetExceeded(BigInt::from(7).pow(8))
        );
        assert!(count_points(&e, 7, Budget::default()).is_ok());
    }

    #[test]
    fn pair_enumeration_matches_character_sum() {
        for (p, k, f) in [
            (3u64, 1usize, vec![0i64, 1, 0, 1]),
            (5, 1, vec![1, 0, 2, 0, 1, 1]),
            (3, 2, vec![2, 1, 1]),
            (7, 1, vec![3, 0, 0, 0, 1]),
        ] {
            let field = construct_field(p, k).unwrap();
            let c = make_hyperelliptic(&field, &Poly::from_signed(p, &f)).unwrap();
            for j in 1..=2 {
                assert_eq!(
                    count_points(&c, j, Budget::default()).unwrap(),
                    hyperelliptic_count_by_pairs(&c, j).unwrap(),
                    "{c} j={j}"
                );
            }
        }
    }
}
