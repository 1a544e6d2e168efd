//! Largest `N_1` compatible with a positive semidefinite absolute Gram
//! matrix of order `m <= 3`.
//!
//! The search is an exact integer scan. `N_1` runs downwards through its
//! Weil interval; for each value the intermediate counts run upwards through
//! theirs. The last count `N_m` enters the Gram matrix only through the
//! corner entry `(0, m)`, and every principal minor containing both `0` and
//! `m` is a concave quadratic in that entry once the remaining minors are
//! nonnegative. Its feasible set is therefore an interval, found exactly from
//! the quadratics instead of by enumeration, and every reported witness is
//! re-checked by [`feasible_counts`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::weil_interval;
use crate::finite_field::prime_power;
use crate::gram::{bareiss_determinant, gram_absolute, psd_check};

/// Largest `q` accepted by [`max_n1`].
pub const MAX_Q: u64 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeasibilityError {
    #[error("order m = {0} is outside 1..=3")]
    TooLarge(usize),
    #[error("q = {q} exceeds the scan budget (q <= {max})")]
    BudgetExceeded { q: u64, max: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("the closed form needs genus at least 1")]
    ZeroGenus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeasibilityProblem {
    pub q: u64,
    pub g: u64,
    pub m: usize,
    /// Require `N_2 >= N_1`, `N_2 = N_1 (mod 2)`, `N_3 >= N_1`,
    /// `N_3 = N_1 (mod 3)`.
    pub place_counts: bool,
}

impl FeasibilityProblem {
    pub fn new(q: u64, g: u64, m: usize) -> Self {
        FeasibilityProblem {
            q,
            g,
            m,
            place_counts: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityResult {
    pub max_n1: BigInt,
    pub witness: Vec<BigInt>,
    /// Count vectors `(N_1, .., N_{m-1})` examined, each followed by an
    /// exact solve for `N_m`.
    pub scanned: u64,
}

fn check_order(m: usize) -> Result<(), FeasibilityError> {
    if !(1..=3).contains(&m) {
        return Err(FeasibilityError::TooLarge(m));
    }
    Ok(())
}

/// Weil interval of `N_j` with the lower end clamped at 0.
fn count_range(q: &BigInt, g: u64, j: usize) -> (BigInt, BigInt) {
    let (lo, hi) = weil_interval(q, g, j);
    (lo.max(BigInt::zero()), hi)
}

/// Place-count conditions on `N_j` given `N_1`, for `j = 2, 3`.
fn place_ok(n1: &BigInt, j: usize, nj: &BigInt) -> bool {
    j == 1 || (nj >= n1 && (nj - n1).is_multiple_of(&BigInt::from(j)))
}

pub fn feasible_counts(
    q: &BigInt,
    g: u64,
    counts: &[BigInt],
    place_counts: bool,
) -> Result<bool, FeasibilityError> {
    let m = counts.len();
    check_order(m)?;
    for (i, n) in counts.iter().enumerate() {
        let (lo, hi) = count_range(q, g, i + 1);
        if n < &lo || n > &hi {
            return Ok(false);
        }
        if place_counts && !place_ok(&counts[0], i + 1, n) {
            return Ok(false);
        }
    }
    let gram = gram_absolute(q, g, counts, m).expect("length checked");
    Ok(psd_check(&gram).expect("size at most 4").psd)
}

fn submatrix(e: &[Vec<BigInt>], idx: &[usize]) -> Vec<Vec<BigInt>> {
    idx.iter()
        .map(|&i| idx.iter().map(|&j| e[i][j].clone()).collect())
        .collect()
}

/// Integer `x` in `[lo, hi]` with `a x^2 + b x + c >= 0`, assuming `a <= 0`
/// so that the set is an interval.
fn quadratic_interval(
    a: &BigInt,
    b: &BigInt,
    c: &BigInt,
    lo: &BigInt,
    hi: &BigInt,
) -> Option<(BigInt, BigInt)> {
    let f = |x: &BigInt| a * x * x + b * x + c;
    let (mut l, mut h) = if a.is_zero() {
        if b.is_zero() {
            if c.is_negative() {
                return None;
            }
            (lo.clone(), hi.clone())
        } else if b.is_positive() {
            // x >= -c / b
            ((-c).div_ceil(b), hi.clone())
        } else {
            // x <= c / -b
            (lo.clone(), c.div_floor(&-b))
        }
    } else {
        // -A x^2 + b x + c >= 0  <=>  x in [(b - sqrt D) / 2A, (b + sqrt D) / 2A]
        let big_a = -a;
        let d: BigInt = b * b + 4 * &big_a * c;
        if d.is_negative() {
            return None;
        }
        let s = d.sqrt();
        let two_a = 2 * &big_a;
        let mut l = BigInt::div_floor(&(b - &s - 1), &two_a);
        let mut h = BigInt::div_floor(&(b + &s + 1), &two_a) + 1;
        // tighten the approximate ends to the exact integer roots
        while l <= h && f(&l).is_negative() {
            l += 1;
        }
        while h >= l && f(&h).is_negative() {
            h -= 1;
        }
        if l > h {
            return None;
        }
        (l, h)
    };
    if &l < lo {
        l = lo.clone();
    }
    if &h > hi {
        h = hi.clone();
    }
    (l <= h).then_some((l, h))
}

/// Smallest admissible `N_m` completing `prefix = (N_1, .., N_{m-1})`, or
/// `None`.
fn solve_last(
    q: &BigInt,
    g: u64,
    prefix: &[BigInt],
    m: usize,
    place_counts: bool,
) -> Option<BigInt> {
    let qm1: BigInt = q.pow(m as u32) + 1;
    let (nlo, nhi) = count_range(q, g, m);
    let nlo = if place_counts && m > 1 {
        nlo.max(prefix[0].clone())
    } else {
        nlo
    };
    if nlo > nhi {
        return None;
    }
    // corner entry e = q^m + 1 - N_m
    let (mut elo, mut ehi) = (&qm1 - &nhi, &qm1 - &nlo);

    let mut counts: Vec<BigInt> = prefix.to_vec();
    counts.push(BigInt::zero());
    let base = gram_absolute(q, g, &counts, m).expect("length checked");
    let mut entries = base.entries().to_vec();

    // minors not containing both 0 and m do not depend on e
    for mask in 1u32..(1 << (m + 1)) {
        let idx: Vec<usize> = (0..=m).filter(|i| mask >> i & 1 == 1).collect();
        if idx.contains(&0) && idx.contains(&m) {
            continue;
        }
        if bareiss_determinant(&submatrix(&entries, &idx)).is_negative() {
            return None;
        }
    }
    for mask in 1u32..(1 << (m + 1)) {
        let idx: Vec<usize> = (0..=m).filter(|i| mask >> i & 1 == 1).collect();
        if !(idx.contains(&0) && idx.contains(&m)) {
            continue;
        }
        let mut at = |e: i64| {
            entries[0][m] = BigInt::from(e);
            entries[m][0] = BigInt::from(e);
            bareiss_determinant(&submatrix(&entries, &idx))
        };
        let (f0, f1, fm1) = (at(0), at(1), at(-1));
        let c = f0;
        let a: BigInt = (&f1 + &fm1) / 2 - &c;
        let b: BigInt = (&f1 - &fm1) / 2;
        debug_assert!(!a.is_positive(), "complementary minor is nonnegative");
        let (l, h) = quadratic_interval(&a, &b, &c, &elo, &ehi)?;
        elo = l;
        ehi = h;
    }

    // ascending N_m is descending e
    let step = BigInt::from(if place_counts && m > 1 { m } else { 1 });
    let mut n: BigInt = &qm1 - &ehi;
    if place_counts && m > 1 {
        let r = BigInt::mod_floor(&(&n - &prefix[0]), &step);
        if !r.is_zero() {
            n += &step - r;
        }
    }
    while n <= &qm1 - &elo {
        counts[m - 1] = n.clone();
        if feasible_counts(q, g, &counts, place_counts).expect("order checked") {
            return Some(n);
        }
        n += &step;
    }
    None
}

/// Feasible completion for a fixed `N_1`, with the number of prefixes
/// examined.
fn complete(
    q: &BigInt,
    g: u64,
    n1: &BigInt,
    m: usize,
    place_counts: bool,
) -> (Option<Vec<BigInt>>, u64) {
    match m {
        1 => {
            let ok = feasible_counts(q, g, std::slice::from_ref(n1), place_counts).expect("m = 1");
            (ok.then(|| vec![n1.clone()]), 1)
        }
        2 => {
            let w = solve_last(q, g, std::slice::from_ref(n1), 2, place_counts)
                .map(|n2| vec![n1.clone(), n2]);
            (w, 1)
        }
        _ => {
            let (lo, hi) = count_range(q, g, 2);
            let mut n2 = lo;
            let mut scanned = 0;
            while n2 <= hi {
                if !place_counts || place_ok(n1, 2, &n2) {
                    scanned += 1;
                    let prefix = [n1.clone(), n2.clone()];
                    if let Some(n3) = solve_last(q, g, &prefix, 3, place_counts) {
                        return (Some(vec![n1.clone(), n2, n3]), scanned);
                    }
                }
                n2 += 1;
            }
            (None, scanned)
        }
    }
}

fn validate(p: &FeasibilityProblem) -> Result<BigInt, FeasibilityError> {
    check_order(p.m)?;
    if p.q > MAX_Q {
        return Err(FeasibilityError::BudgetExceeded { q: p.q, max: MAX_Q });
    }
    if prime_power(p.q).is_none() {
        return Err(FeasibilityError::NotPrimePower(p.q));
    }
    Ok(BigInt::from(p.q))
}

/// Largest feasible `N_1`, scanning `N_1` downwards from the Weil upper end.
/// Candidates are evaluated in parallel batches and the batches consumed in
/// scan order, so the result equals [`max_n1_serial`].
pub fn max_n1(p: &FeasibilityProblem) -> Result<FeasibilityResult, FeasibilityError> {
    let q = validate(p)?;
    let (lo, hi) = count_range(&q, p.g, 1);
    let candidates: Vec<BigInt> = num_iter(&lo, &hi).rev().collect();
    let batch = rayon::current_num_threads().max(1);
    let mut scanned = 0;
    for chunk in candidates.chunks(batch) {
        let results: Vec<_> = chunk
            .par_iter()
            .map(|n1| complete(&q, p.g, n1, p.m, p.place_counts))
            .collect();
        for (n1, (w, s)) in chunk.iter().zip(results) {
            scanned += s;
            if let Some(witness) = w {
                return Ok(FeasibilityResult {
                    max_n1: n1.clone(),
                    witness,
                    scanned,
                });
            }
        }
    }
    unreachable!("the line-like count vector is always feasible")
}

pub fn max_n1_serial(p: &FeasibilityProblem) -> Result<FeasibilityResult, FeasibilityError> {
    let q = validate(p)?;
    let (lo, hi) = count_range(&q, p.g, 1);
    let mut scanned = 0;
    for n1 in num_iter(&lo, &hi).rev() {
        let (w, s) = complete(&q, p.g, &n1, p.m, p.place_counts);
        scanned += s;
        if let Some(witness) = w {
            return Ok(FeasibilityResult {
                max_n1: n1,
                witness,
                scanned,
            });
        }
    }
    unreachable!("the line-like count vector is always feasible")
}

fn num_iter(lo: &BigInt, hi: &BigInt) -> impl DoubleEndedIterator<Item = BigInt> {
    let lo = lo.to_i64().expect("small range");
    let hi = hi.to_i64().expect("small range");
    (lo..=hi).map(BigInt::from)
}

/// `q + 1 + (sqrt(R) - g) / 2` with `R = g^2 (8q + 1) + 4 g q (q - 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IharaBound {
    pub radicand: BigInt,
    /// `q + 1 - g/2`, the rational part.
    pub linear: BigRational,
    /// Floor of the full expression.
    pub floor: BigInt,
}

impl IharaBound {
    pub fn to_f64(&self) -> f64 {
        self.linear.to_f64().unwrap_or(f64::NAN)
            + self.radicand.to_f64().unwrap_or(f64::NAN).sqrt() / 2.0
    }
}

pub fn ihara_closed_form(q: u64, g: u64) -> Result<IharaBound, FeasibilityError> {
    if g == 0 {
        return Err(FeasibilityError::ZeroGenus);
    }
    let (qb, gb) = (BigInt::from(q), BigInt::from(g));
    let radicand: BigInt = &gb * &gb * (8 * &qb + 1) + 4 * &gb * &qb * (&qb - 1);
    // floor((s - g)/2) = floor((floor(s) - g)/2) for real s
    let floor = &qb + 1 + (radicand.sqrt() - &gb).div_floor(&BigInt::from(2));
    let linear = BigRational::from_integer(&qb + 1) - BigRational::new(gb, BigInt::from(2));
    Ok(IharaBound {
        radicand,
        linear,
        floor,
    })
}
