//! Discrete-logarithm tables for bulk scans over a field of moderate size.
//!
//! Nonzero elements are encoded by `1 + log_g(a)` for a fixed primitive
//! element `g`, and zero by `0`. Multiplication is addition of logarithms and
//! addition goes through the Zech table `Z(n) = log_g(1 + g^n)`. Every result
//! is exact; the tables are only a change of representation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;

use super::{FieldElement, FieldError, FieldSpec};

pub(crate) type Code = u32;
pub(crate) const ZERO: Code = 0;
const NO_LOG: u32 = u32::MAX;

/// Largest field order for which tables are built (memory guard).
pub(crate) const MAX_TABLE_ORDER: u64 = 1 << 28;

pub(crate) struct LogTables {
    p: u64,
    q: u64,
    qm1: u64,
    /// element index -> log (entry 0 unused)
    log: Vec<u32>,
    /// log -> element index
    exp: Vec<u32>,
    /// n -> log(1 + g^n), or NO_LOG when 1 + g^n = 0
    zech: Vec<u32>,
    neg_one: Code,
}

type TableCache = Mutex<HashMap<(u64, usize), Arc<LogTables>>>;

/// Tables for `field`, built once per field and shared.
pub(crate) fn tables_for(field: &FieldSpec) -> Result<Arc<LogTables>, FieldError> {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    let q = field
        .order_u64()
        .filter(|&q| q <= MAX_TABLE_ORDER)
        .ok_or_else(|| FieldError::TooLargeToEnumerate(field.order().clone()))?;
    let key = (field.characteristic(), field.degree());
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("table cache poisoned").get(&key) {
        return Ok(t.clone());
    }
    let built = Arc::new(LogTables::build(field, q));
    cache
        .lock()
        .expect("table cache poisoned")
        .entry(key)
        .or_insert_with(|| built.clone());
    Ok(built)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `out = a*b mod modulus`; `modulus` is monic of length `k+1`.
fn mul_raw(p: u64, modulus: &[u64], a: &[u64], b: &[u64], out: &mut [u64], buf: &mut [u64]) {
    let k = a.len();
    buf.iter_mut().for_each(|c| *c = 0);
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            buf[i + j] = (buf[i + j] + x * y) % p;
        }
    }
    for i in (k..buf.len()).rev() {
        let c = buf[i];
        if c == 0 {
            continue;
        }
        for (t, &m) in modulus.iter().enumerate().take(k) {
            let idx = i - k + t;
            buf[idx] = (buf[idx] + (p - c) * m) % p;
        }
        buf[i] = 0;
    }
    out.copy_from_slice(&buf[..k]);
}

impl LogTables {
    fn build(field: &FieldSpec, q: u64) -> Self {
        let p = field.characteristic();
        let k = field.degree();
        let qm1 = q - 1;
        let factors = prime_factors(qm1);
        let generator = (1..q)
            .map(|i| field.element_at(i))
            .find(|g| {
                factors
                    .iter()
                    .all(|r| !g.pow_big(&BigUint::from(qm1 / r)).is_one())
            })
            .expect("multiplicative group is cyclic");
        let g = generator.coeffs();
        let modulus = field.modulus();

        let mut log = vec![0u32; q as usize];
        let mut exp = vec![0u32; qm1 as usize];
        let mut cur = vec![0u64; k];
        cur[0] = 1;
        let mut next = vec![0u64; k];
        let mut buf = vec![0u64; 2 * k - 1];
        for i in 0..qm1 {
            let idx = cur.iter().rev().fold(0u64, |acc, &c| acc * p + c);
            exp[i as usize] = idx as u32;
            log[idx as usize] = i as u32;
            mul_raw(p, modulus, &cur, &g, &mut next, &mut buf);
            std::mem::swap(&mut cur, &mut next);
        }

        let zech = exp
            .iter()
            .map(|&idx| {
                let idx = idx as u64;
                // adding 1 bumps the lowest base-p digit
                let bumped = if idx % p == p - 1 {
                    idx - (p - 1)
                } else {
                    idx + 1
                };
                if bumped == 0 {
                    NO_LOG
                } else {
                    log[bumped as usize]
                }
            })
            .collect();

        let neg_one_index = p - 1;
        let neg_one = 1 + log[neg_one_index as usize];
        LogTables {
            p,
            q,
            qm1,
            log,
            exp,
            zech,
            neg_one,
        }
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Codes `0..q`, i.e. every element exactly once.
    pub fn all_codes(&self) -> std::ops::Range<Code> {
        0..self.q as Code
    }

    pub fn code_of_index(&self, index: u64) -> Code {
        if index == 0 {
            ZERO
        } else {
            1 + self.log[index as usize]
        }
    }

    pub fn index_of(&self, code: Code) -> u64 {
        if code == ZERO {
            0
        } else {
            self.exp[(code - 1) as usize] as u64
        }
    }

    /// Image of an integer of the prime field.
    pub fn prime_code(&self, c: u64) -> Code {
        self.code_of_index(c % self.p)
    }

    pub fn to_element(&self, field: &FieldSpec, code: Code) -> FieldElement {
        field.element_at(self.index_of(code))
    }

    #[inline]
    pub fn mul(&self, a: Code, b: Code) -> Code {
        if a == ZERO || b == ZERO {
            return ZERO;
        }
        let s = (a - 1) as u64 + (b - 1) as u64;
        1 + (s % self.qm1) as Code
    }

    #[inline]
    pub fn add(&self, a: Code, b: Code) -> Code {
        if a == ZERO {
            return b;
        }
        if b == ZERO {
            return a;
        }
        let (la, lb) = ((a - 1) as u64, (b - 1) as u64);
        let d = (lb + self.qm1 - la) % self.qm1;
        let z = self.zech[d as usize];
        if z == NO_LOG {
            ZERO
        } else {
            1 + ((la + z as u64) % self.qm1) as Code
        }
    }

    #[inline]
    pub fn neg(&self, a: Code) -> Code {
        self.mul(a, self.neg_one)
    }

    #[inline]
    pub fn sub(&self, a: Code, b: Code) -> Code {
        self.add(a, self.neg(b))
    }

    /// Inverse of a nonzero code.
    pub fn inv(&self, a: Code) -> Code {
        debug_assert_ne!(a, ZERO);
        let l = (a - 1) as u64;
        1 + ((self.qm1 - l) % self.qm1) as Code
    }

    pub fn pow(&self, a: Code, e: u64) -> Code {
        if e == 0 {
            return 1;
        }
        if a == ZERO {
            return ZERO;
        }
        let l = (a - 1) as u128 * e as u128 % self.qm1 as u128;
        1 + l as Code
    }

    /// Nonzero squares are exactly the even logarithms (odd characteristic).
    #[inline]
    pub fn is_nonzero_square(&self, a: Code) -> bool {
        a != ZERO && (a - 1).is_multiple_of(2)
    }

    /// Number of `y` with `y^2 = a`, odd characteristic.
    #[inline]
    pub fn sqrt_count(&self, a: Code) -> u64 {
        if a == ZERO {
            1
        } else if (a - 1).is_multiple_of(2) {
            2
        } else {
            0
        }
    }

    /// True iff the log `n` is the smallest in its orbit under `n -> p*n`,
    /// i.e. `g^n` represents its Frobenius orbit.
    pub fn is_orbit_representative(&self, n: u64) -> bool {
        let mut m = n * self.p % self.qm1;
        while m != n {
            if m < n {
                return false;
            }
            m = m * self.p % self.qm1;
        }
        true
    }
}
