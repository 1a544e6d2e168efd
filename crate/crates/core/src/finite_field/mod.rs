//! Exact arithmetic in finite fields `F_{p^k} = F_p[t]/(m(t))`.
//!
//! The defining polynomial `m` is always the lexicographically smallest monic
//! irreducible polynomial of degree `k` (coefficients compared from the
//! constant term upwards), so a field is determined by `(p, k)` alone and
//! construction is reproducible. Extensions `F_{q^j}` are built as fresh
//! fields of degree `k*j` over `F_p`; the only embedding ever needed is the
//! constant one `F_p ⊂ F_{p^(kj)}`.
//!
//! [`FieldElement`] is the exact, allocation-backed public representation.
//! Bulk scans (point counting, singular-point search) go through the
//! discrete-log tables in [`tables`].

pub(crate) mod tables;

use std::collections::HashMap;
use std::fmt;
use std::ops;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid extension degree {0}")]
    InvalidDegree(usize),
    #[error("prime {0} is too large (must be below 2^32)")]
    PrimeTooLarge(u64),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("zero input")]
    ZeroInput,
    #[error("field of order {0} is too large to enumerate")]
    TooLargeToEnumerate(BigInt),
}

/// Deterministic primality test by trial division (adequate for `p < 2^32`).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// If `q = p^k` for a prime `p` and `k >= 1`, returns `(p, k)`.
pub fn prime_power(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&d| q.is_multiple_of(d))?;
    let (mut rest, mut k) = (q, 0usize);
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

struct FieldInner {
    p: u64,
    k: usize,
    modulus: Poly,
    q: BigInt,
}

/// A finite field `F_{p^k}`. Cheap to clone; equality is by `(p, modulus)`.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<FieldInner>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.inner.p)
            .field("k", &self.inner.k)
            .field("modulus", &self.inner.modulus.coeffs())
            .finish()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.inner.q)
    }
}

/// Builds `F_{p^k}` with the lexicographically smallest monic irreducible modulus.
pub fn construct_field(p: u64, k: usize) -> Result<FieldSpec, FieldError> {
    FieldSpec::new(p, k)
}

impl FieldSpec {
    pub fn new(p: u64, k: usize) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p >= 1 << 32 {
            return Err(FieldError::PrimeTooLarge(p));
        }
        if k < 1 {
            return Err(FieldError::InvalidDegree(k));
        }
        static CACHE: OnceLock<Mutex<HashMap<(u64, usize), FieldSpec>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(field) = cache.lock().expect("field cache poisoned").get(&(p, k)) {
            return Ok(field.clone());
        }
        let modulus = smallest_irreducible(p, k);
        let field = FieldSpec {
            inner: Arc::new(FieldInner {
                p,
                k,
                modulus,
                q: BigInt::from(p).pow(k as u32),
            }),
        };
        cache
            .lock()
            .expect("field cache poisoned")
            .insert((p, k), field.clone());
        Ok(field)
    }

    /// `F_{q^j}`, i.e. `construct_field(p, k*j)`.
    pub fn extension(&self, j: usize) -> Result<FieldSpec, FieldError> {
        if j < 1 {
            return Err(FieldError::InvalidDegree(j));
        }
        if j == 1 {
            return Ok(self.clone());
        }
        FieldSpec::new(self.inner.p, self.inner.k * j)
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }

    pub fn degree(&self) -> usize {
        self.inner.k
    }

    /// Field order `q = p^k`.
    pub fn order(&self) -> &BigInt {
        &self.inner.q
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.inner.q.to_u64()
    }

    /// Coefficients of the defining polynomial, ascending, monic of length `k+1`.
    pub fn modulus(&self) -> &[u64] {
        self.inner.modulus.coeffs()
    }

    pub(crate) fn modulus_poly(&self) -> &Poly {
        &self.inner.modulus
    }

    pub fn is_odd_characteristic(&self) -> bool {
        self.inner.p != 2
    }

    pub fn zero(&self) -> FieldElement {
        self.reduce_poly(Poly::zero(self.inner.p))
    }

    pub fn one(&self) -> FieldElement {
        self.reduce_poly(Poly::one(self.inner.p))
    }

    /// The image of an integer under `Z -> F_p ⊂ F_q`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        self.reduce_poly(Poly::from_signed(self.inner.p, &[n]))
    }

    /// The class of `t`, the root of the modulus.
    pub fn generator(&self) -> FieldElement {
        self.reduce_poly(Poly::x(self.inner.p))
    }

    /// Element with the given coefficients (ascending in `t`, reduced mod `p`
    /// and mod the modulus).
    pub fn element(&self, coeffs: &[u64]) -> FieldElement {
        self.reduce_poly(Poly::new(self.inner.p, coeffs.to_vec()))
    }

    fn reduce_poly(&self, poly: Poly) -> FieldElement {
        FieldElement {
            value: poly.rem(&self.inner.modulus),
            field: self.clone(),
        }
    }

    /// Element whose little-endian base-`p` digits are `index`.
    pub fn element_at(&self, mut index: u64) -> FieldElement {
        let p = self.inner.p;
        let mut coeffs = Vec::with_capacity(self.inner.k);
        for _ in 0..self.inner.k {
            coeffs.push(index % p);
            index /= p;
        }
        self.element(&coeffs)
    }

    /// All `q` elements, counting coefficient tuples little-endian from 0.
    pub fn enumerate_elements(&self) -> Result<Vec<FieldElement>, FieldError> {
        let q = self
            .order_u64()
            .filter(|&q| q <= 1 << 26)
            .ok_or_else(|| FieldError::TooLargeToEnumerate(self.inner.q.clone()))?;
        Ok((0..q).map(|i| self.element_at(i)).collect())
    }
}

/// Lexicographically smallest monic irreducible of degree `k`, comparing
/// `(c_0, c_1, ..., c_{k-1})` with `c_0` most significant.
fn smallest_irreducible(p: u64, k: usize) -> Poly {
    let mut digits = vec![0u64; k];
    loop {
        let mut coeffs = digits.clone();
        coeffs.push(1);
        let candidate = Poly::new(p, coeffs);
        if candidate.is_irreducible() {
            return candidate;
        }
        // c_{k-1} is the least significant digit
        let mut pos = k;
        loop {
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < p {
                break;
            }
            digits[pos] = 0;
            assert!(
                pos > 0,
                "no irreducible polynomial of degree {k} over F_{p}"
            );
        }
    }
}

/// An element of a [`FieldSpec`], stored as a reduced polynomial in `t`.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    value: Poly,
    field: FieldSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn arithmetic(
    a: &FieldElement,
    b: &FieldElement,
    op: ArithOp,
) -> Result<FieldElement, FieldError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
    }
}

impl FieldElement {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Exactly `k` coefficients, ascending in `t`.
    pub fn coeffs(&self) -> Vec<u64> {
        (0..self.field.degree())
            .map(|i| self.value.coeff(i))
            .collect()
    }

    /// Position of this element in [`FieldSpec::enumerate_elements`].
    pub fn index(&self) -> u64 {
        let p = self.field.characteristic();
        self.value
            .coeffs()
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * p + c)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.coeffs() == [1]
    }

    fn check_same(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_same(other)?;
        Ok(self.field.reduce_poly(self.value.add(&other.value)))
    }

    pub fn try_sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_same(other)?;
        Ok(self.field.reduce_poly(self.value.sub(&other.value)))
    }

    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_same(other)?;
        Ok(self.field.reduce_poly(self.value.mul(&other.value)))
    }

    pub fn neg(&self) -> FieldElement {
        self.field.reduce_poly(self.value.neg())
    }

    /// Multiplicative inverse by extended Euclid against the modulus.
    pub fn invert(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let (g, s, _) = self.value.ext_gcd(self.field.modulus_poly());
        debug_assert!(g.is_constant() && !g.is_zero());
        Ok(self.field.reduce_poly(s))
    }

    pub fn pow(&self, n: u64) -> FieldElement {
        self.pow_big(&BigUint::from(n))
    }

    /// Square-and-multiply; `0^0 = 1`.
    pub fn pow_big(&self, n: &BigUint) -> FieldElement {
        let mut result = self.field.one();
        for i in (0..n.bits()).rev() {
            result = &result * &result;
            if n.bit(i) {
                result = &result * self;
            }
        }
        result
    }

    /// Euler's criterion `a^((q-1)/2) = 1`.
    pub fn is_square(&self) -> Result<bool, FieldError> {
        if !self.field.is_odd_characteristic() {
            return Err(FieldError::EvenCharacteristic);
        }
        if self.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        let q = self.field.order().to_biguint().expect("positive order");
        let e = (q - BigUint::one()) >> 1;
        Ok(self.pow_big(&e).is_one())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self, self.field)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            return write!(f, "{}", self.value.coeff(0));
        }
        // reuse the polynomial printer, renaming the variable
        write!(f, "{}", self.value.to_string().replace('x', "t"))
    }
}

macro_rules! panicking_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        /// Panics if the operands belong to different fields; use the
        /// `try_*` methods for a fallible version.
        impl ops::$trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).expect("field mismatch")
            }
        }
    };
}

panicking_op!(Add, add, try_add);
panicking_op!(Sub, sub, try_sub);
panicking_op!(Mul, mul, try_mul);
