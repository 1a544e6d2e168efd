//! L-polynomials of curves from point counts.
//!
//! For a curve of genus `g` over `F_q` the zeta numerator is
//! `L(T) = c_0 + c_1 T + ... + c_{2g} T^{2g}` with `c_0 = 1`, and the power
//! sums `t_j = q^j + 1 - N_j` of its inverse roots satisfy Newton's
//! identities `n c_n = -(t_1 c_{n-1} + ... + t_n c_0)`. Everything here is
//! exact integer arithmetic except [`check_riemann_hypothesis`], which
//! locates the inverse roots numerically.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZetaError {
    #[error("Newton identities give a non-integer coefficient c_{index}")]
    NonIntegerCoefficient { index: usize },
    #[error("expected {expected} point counts, got {found}")]
    CountLengthMismatch { expected: usize, found: usize },
    #[error("root finder did not converge")]
    RootFindingFailure,
    #[error("L-polynomial must have odd length with constant term 1")]
    MalformedPolynomial,
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
}

pub const DEFAULT_RH_TOL: f64 = 1e-9;
pub const ROOT_RESIDUAL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPolynomial {
    q: BigInt,
    g: usize,
    coeffs: Vec<BigInt>,
}

impl LPolynomial {
    /// `coeffs` ascending, of length `2g + 1` with `c_0 = 1`. The functional
    /// equation is not enforced here; see [`check_functional_equation`].
    pub fn new(q: BigInt, coeffs: Vec<BigInt>) -> Result<Self, ZetaError> {
        if coeffs.len().is_multiple_of(2) || !coeffs[0].is_one() {
            return Err(ZetaError::MalformedPolynomial);
        }
        Ok(LPolynomial {
            q,
            g: coeffs.len() / 2,
            coeffs,
        })
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }
}

fn power_sums(q: &BigInt, counts: &[BigInt]) -> Vec<BigInt> {
    counts
        .iter()
        .enumerate()
        .map(|(i, n)| q.pow(i as u32 + 1) + 1 - n)
        .collect()
}

/// Reconstructs `L` from `N_1..N_g`.
pub fn l_from_counts(q: &BigInt, g: usize, counts: &[BigInt]) -> Result<LPolynomial, ZetaError> {
    if counts.len() != g {
        return Err(ZetaError::CountLengthMismatch {
            expected: g,
            found: counts.len(),
        });
    }
    let t = power_sums(q, counts);
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    for n in 1..=g {
        let s: BigInt = (1..=n).map(|k| &t[k - 1] * &c[n - k]).sum();
        let (quot, rem) = (-s).div_rem(&BigInt::from(n));
        if !rem.is_zero() {
            return Err(ZetaError::NonIntegerCoefficient { index: n });
        }
        c.push(quot);
    }
    for i in (0..g).rev() {
        c.push(q.pow((g - i) as u32) * &c[i]);
    }
    Ok(LPolynomial {
        q: q.clone(),
        g,
        coeffs: c,
    })
}

/// `t_1..t_n` from the coefficients, with `c_i = 0` beyond `2g`.
fn newton_power_sums(l: &LPolynomial, n: usize) -> Vec<BigInt> {
    let c = |i: usize| l.coeffs.get(i).cloned().unwrap_or_default();
    let mut t: Vec<BigInt> = Vec::with_capacity(n);
    for m in 1..=n {
        let mut s = -BigInt::from(m) * c(m);
        for k in 1..m {
            s -= &t[k - 1] * c(m - k);
        }
        t.push(s);
    }
    t
}

/// `N_j` predicted by `L`.
pub fn extrapolate(l: &LPolynomial, j: usize) -> BigInt {
    assert!(j >= 1, "extension degree is positive");
    let t = newton_power_sums(l, j);
    l.q.pow(j as u32) + 1 - &t[j - 1]
}

/// `c_{2g-i} = q^{g-i} c_i` for every `0 <= i <= g`.
pub fn check_functional_equation(l: &LPolynomial) -> bool {
    let g = l.g;
    (0..=g).all(|i| l.coeffs[2 * g - i] == l.q.pow((g - i) as u32) * &l.coeffs[i])
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhReport {
    /// Largest `| |alpha| - sqrt(q) |` over the inverse roots.
    pub max_deviation: f64,
    pub pass: bool,
    /// `|alpha|` for each distinct inverse root.
    pub moduli: Vec<f64>,
}

// --- exact squarefree part over Q ---

type QPoly = Vec<BigRational>;

fn q_trim(mut a: QPoly) -> QPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn q_rem(mut a: QPoly, b: &QPoly) -> QPoly {
    let db = b.len() - 1;
    let lead = b[db].clone();
    while a.len() > db {
        let factor = a.last().unwrap() / &lead;
        let shift = a.len() - 1 - db;
        for (i, bc) in b.iter().enumerate() {
            a[shift + i] -= &factor * bc;
        }
        a.pop();
        a = q_trim(a);
    }
    a
}

fn q_div(a: &QPoly, b: &QPoly) -> QPoly {
    let db = b.len() - 1;
    let mut rem = a.clone();
    let mut quot = vec![BigRational::zero(); a.len() - db];
    while rem.len() > db {
        let shift = rem.len() - 1 - db;
        let factor = rem.last().unwrap() / &b[db];
        for (i, bc) in b.iter().enumerate() {
            rem[shift + i] -= &factor * bc;
        }
        quot[shift] = factor;
        rem.pop();
    }
    quot
}

fn q_gcd(mut a: QPoly, mut b: QPoly) -> QPoly {
    while !b.is_empty() {
        let r = q_rem(a, &b);
        a = b;
        b = r;
    }
    a
}

fn squarefree_part(p: &[BigInt]) -> QPoly {
    let a: QPoly = p
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    let da: QPoly = q_trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect(),
    );
    if da.is_empty() {
        return a;
    }
    let g = q_gcd(a.clone(), da);
    q_div(&a, &g)
}

// --- numerical roots ---

fn horner_c(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn derivative_c(p: &[Complex64]) -> Vec<Complex64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

/// One root of `p` by Laguerre's method from `x`.
fn laguerre(p: &[Complex64], mut x: Complex64) -> Option<Complex64> {
    let n = (p.len() - 1) as f64;
    let dp = derivative_c(p);
    let ddp = derivative_c(&dp);
    // cycle breaking for the rare limit cycles of Laguerre's iteration
    const FRACTIONS: [f64; 8] = [0.5, 0.25, 0.75, 0.13, 0.38, 0.62, 0.88, 1.0];
    for iter in 1..=800 {
        let b = horner_c(p, x);
        if b.norm() == 0.0 {
            return Some(x);
        }
        let g = horner_c(&dp, x) / b;
        let h = g * g - horner_c(&ddp, x) / b;
        let sq = ((h * n - g * g) * (n - 1.0)).sqrt();
        let (gp, gm) = (g + sq, g - sq);
        let denom = if gp.norm() >= gm.norm() { gp } else { gm };
        let dx = if denom.norm() > 0.0 {
            Complex64::new(n, 0.0) / denom
        } else {
            Complex64::from_polar(1.0 + x.norm(), iter as f64)
        };
        let x1 = x - dx;
        if x1 == x {
            return Some(x);
        }
        if iter % 10 == 0 {
            x -= dx * FRACTIONS[(iter / 10) % FRACTIONS.len()];
        } else {
            x = x1;
        }
        if dx.norm() <= f64::EPSILON * x.norm() {
            return Some(x);
        }
    }
    None
}

fn relative_residual(p: &[Complex64], z: Complex64) -> f64 {
    let scale: f64 = p
        .iter()
        .enumerate()
        .map(|(i, c)| c.norm() * z.norm().powi(i as i32))
        .sum();
    horner_c(p, z).norm() / scale
}

/// All roots of `p` (ascending coefficients) by Laguerre with deflation,
/// each polished by Newton steps on the undeflated polynomial.
fn roots(p: &[Complex64]) -> Result<Vec<Complex64>, ZetaError> {
    let mut work = p.to_vec();
    let mut out = Vec::with_capacity(p.len() - 1);
    while work.len() > 1 {
        let z = laguerre(&work, Complex64::new(0.0, 0.0)).ok_or(ZetaError::RootFindingFailure)?;
        // synthetic division by (x - z)
        let n = work.len() - 1;
        let mut quot = vec![Complex64::new(0.0, 0.0); n];
        let mut carry = work[n];
        for i in (0..n).rev() {
            quot[i] = carry;
            carry = work[i] + carry * z;
        }
        work = quot;
        out.push(z);
    }
    let dp = derivative_c(p);
    for z in out.iter_mut() {
        *z = laguerre(p, *z).ok_or(ZetaError::RootFindingFailure)?;
        for _ in 0..4 {
            let d = horner_c(&dp, *z);
            if d.norm() == 0.0 {
                break;
            }
            let step = horner_c(p, *z) / d;
            if !step.is_finite() {
                break;
            }
            *z -= step;
        }
        if relative_residual(p, *z) > ROOT_RESIDUAL {
            return Err(ZetaError::RootFindingFailure);
        }
    }
    Ok(out)
}

/// Checks `|alpha| = sqrt(q)` for every inverse root `alpha` of `L`, i.e.
/// every root of the reversed polynomial `T^{2g} L(1/T)`.
///
/// Repeated roots are removed first by dividing out `gcd(P, P')` exactly,
/// so the numerical stage only sees simple roots.
pub fn check_riemann_hypothesis(l: &LPolynomial, tol: f64) -> Result<RhReport, ZetaError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(ZetaError::InvalidTolerance(tol));
    }
    if l.g == 0 {
        return Ok(RhReport {
            max_deviation: 0.0,
            pass: true,
            moduli: Vec::new(),
        });
    }
    let reversed: Vec<BigInt> = l.coeffs.iter().rev().cloned().collect();
    let sqf = squarefree_part(&reversed);
    let lead = sqf.last().unwrap().clone();
    let monic: Vec<Complex64> = sqf
        .iter()
        .map(|c| Complex64::new((c / &lead).to_f64().unwrap_or(f64::NAN), 0.0))
        .collect();
    if monic.iter().any(|c| !c.is_finite()) {
        return Err(ZetaError::RootFindingFailure);
    }
    let sqrt_q = l.q.to_f64().unwrap_or(f64::INFINITY).sqrt();
    let moduli: Vec<f64> = roots(&monic)?.iter().map(|z| z.norm()).collect();
    let max_deviation = moduli
        .iter()
        .map(|m| (m - sqrt_q).abs())
        .fold(0.0, f64::max);
    Ok(RhReport {
        max_deviation,
        pass: max_deviation <= tol,
        moduli,
    })
}

/// Smallest `g <= m/2` whose L-polynomial built from `N_1..N_g` has integer
/// coefficients, satisfies the Riemann hypothesis and reproduces
/// `N_{g+1}..N_m`.
pub fn infer_genus(q: &BigInt, counts: &[BigInt], tol: f64) -> Option<usize> {
    let m = counts.len();
    (0..=m / 2).find(|&g| {
        let Ok(l) = l_from_counts(q, g, &counts[..g]) else {
            return false;
        };
        let rh = check_riemann_hypothesis(&l, tol).is_ok_and(|r| r.pass);
        rh && (g + 1..=m).all(|j| extrapolate(&l, j) == counts[j - 1])
    })
}
