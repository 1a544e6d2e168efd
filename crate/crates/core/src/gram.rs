//! Gram matrices of the Frobenius classes `gamma^0..gamma^m`.
//!
//! Only inner products are represented. For a curve of genus `g` over `F_q`
//! with counts `N_j`:
//!
//! * absolute: `<gamma^i, gamma^i> = 2g q^i`,
//!   `<gamma^i, gamma^{i+j}> = q^i (q^j + 1 - N_j)`;
//! * relative to a cover `X -> Y`: `2(gX - gY) q^i` and `q^i (N_j(Y) - N_j(X))`;
//! * square diagram: `2G q^i` and `q^i (N_j(Y1) + N_j(Y2) - N_j(X) - N_j(Z))`
//!   with `G = gX - gY1 - gY2 + gZ`.
//!
//! Entries are exact integers and positive semidefiniteness is decided from
//! exact principal minors.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GramError {
    #[error("need at least {needed} point counts, got {found}")]
    InsufficientCounts { needed: usize, found: usize },
    #[error("gX = {gx} is smaller than gY = {gy}; no cover X -> Y exists")]
    GenusOrder { gx: u64, gy: u64 },
    #[error("gX - gY1 - gY2 + gZ = {0} is negative")]
    NegativeRelativeGenus(i64),
    #[error("matrix of size {0} exceeds the exhaustive-minor limit of 8")]
    TooLarge(usize),
    #[error("index {index} out of range for a {size}x{size} matrix")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("Schwarz margin needs two distinct indices")]
    SameIndex,
    #[error("combination of length {found} does not match matrix size {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Largest matrix for which every principal minor is evaluated.
pub const MAX_PSD_SIZE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GramKind {
    Absolute,
    Relative,
    Diagram,
    Combined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GramMatrix {
    #[serde(serialize_with = "crate::serde_str::matrix")]
    entries: Vec<Vec<BigInt>>,
    labels: Vec<String>,
    kind: GramKind,
    #[serde(serialize_with = "crate::serde_str::one")]
    q: BigInt,
    /// Genera the matrix was built from, in argument order.
    genera: Vec<u64>,
}

impl GramMatrix {
    pub fn entries(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i][j]
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn kind(&self) -> GramKind {
        self.kind
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn genera(&self) -> &[u64] {
        &self.genera
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|x| x.is_zero())
    }

    pub fn determinant(&self) -> BigInt {
        bareiss_determinant(&self.entries)
    }

    /// Builds a matrix from explicit integer rows, e.g. for checking a
    /// hand-written Gram matrix. Panics unless square and symmetric.
    pub fn from_rows(q: BigInt, rows: Vec<Vec<BigInt>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "square matrix");
        for (i, row) in rows.iter().enumerate() {
            for (j, other) in rows.iter().enumerate().take(i) {
                assert_eq!(row[j], other[i], "symmetric matrix");
            }
        }
        GramMatrix {
            labels: (0..n).map(|i| format!("v{i}")).collect(),
            entries: rows,
            kind: GramKind::Combined,
            q,
            genera: Vec::new(),
        }
    }
}

impl std::fmt::Display for GramMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

fn require(counts: &[BigInt], m: usize) -> Result<(), GramError> {
    if counts.len() < m {
        return Err(GramError::InsufficientCounts {
            needed: m,
            found: counts.len(),
        });
    }
    Ok(())
}

/// `diag * q^i` on the diagonal and `q^i * off[j - 1]` at `(i, i + j)`.
fn toeplitz_scaled(q: &BigInt, m: usize, diag: &BigInt, off: &[BigInt]) -> Vec<Vec<BigInt>> {
    let qi: Vec<BigInt> = (0..=m).map(|i| q.pow(i as u32)).collect();
    let mut e = vec![vec![BigInt::zero(); m + 1]; m + 1];
    for i in 0..=m {
        e[i][i] = diag * &qi[i];
        for j in 1..=m - i {
            let v = &qi[i] * &off[j - 1];
            e[i][i + j] = v.clone();
            e[i + j][i] = v;
        }
    }
    e
}

fn labels(m: usize, suffix: &str) -> Vec<String> {
    (0..=m).map(|i| format!("gamma^{i}{suffix}")).collect()
}

pub fn gram_absolute(
    q: &BigInt,
    g: u64,
    counts: &[BigInt],
    m: usize,
) -> Result<GramMatrix, GramError> {
    require(counts, m)?;
    let off: Vec<BigInt> = (1..=m)
        .map(|j| q.pow(j as u32) + 1 - &counts[j - 1])
        .collect();
    Ok(GramMatrix {
        entries: toeplitz_scaled(q, m, &BigInt::from(2 * g), &off),
        labels: labels(m, ""),
        kind: GramKind::Absolute,
        q: q.clone(),
        genera: vec![g],
    })
}

pub fn gram_relative(
    q: &BigInt,
    gx: u64,
    gy: u64,
    counts_x: &[BigInt],
    counts_y: &[BigInt],
    m: usize,
) -> Result<GramMatrix, GramError> {
    require(counts_x, m)?;
    require(counts_y, m)?;
    if gx < gy {
        return Err(GramError::GenusOrder { gx, gy });
    }
    let off: Vec<BigInt> = (0..m).map(|j| &counts_y[j] - &counts_x[j]).collect();
    Ok(GramMatrix {
        entries: toeplitz_scaled(q, m, &BigInt::from(2 * (gx - gy)), &off),
        labels: labels(m, "_X/Y"),
        kind: GramKind::Relative,
        q: q.clone(),
        genera: vec![gx, gy],
    })
}

/// `G = gX - gY1 - gY2 + gZ` as a signed integer.
pub fn diagram_genus(genera: [u64; 4]) -> i64 {
    let [gx, gy1, gy2, gz] = genera.map(|g| g as i64);
    gx - gy1 - gy2 + gz
}

/// `genera` and `counts` are ordered `(X, Y1, Y2, Z)`.
pub fn gram_diagram(
    q: &BigInt,
    genera: [u64; 4],
    counts: [&[BigInt]; 4],
    m: usize,
) -> Result<GramMatrix, GramError> {
    for c in counts {
        require(c, m)?;
    }
    let big_g = diagram_genus(genera);
    if big_g < 0 {
        return Err(GramError::NegativeRelativeGenus(big_g));
    }
    let [x, y1, y2, z] = counts;
    let off: Vec<BigInt> = (0..m).map(|j| &y1[j] + &y2[j] - &x[j] - &z[j]).collect();
    Ok(GramMatrix {
        entries: toeplitz_scaled(q, m, &BigInt::from(2 * big_g), &off),
        labels: labels(m, "_12"),
        kind: GramKind::Diagram,
        q: q.clone(),
        genera: genera.to_vec(),
    })
}

/// Determinant by fraction-free Gaussian elimination. Every intermediate
/// value is itself a minor of the input, so all divisions are exact.
pub fn bareiss_determinant(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsdVerdict {
    pub psd: bool,
    /// First index subset, in lexicographic order of the sorted index
    /// sequences, whose principal minor is negative.
    pub witness: Option<Vec<usize>>,
    pub determinant: BigInt,
}

/// Nonempty subsets of `0..n` as sorted sequences, lexicographically:
/// `{0}, {0,1}, {0,1,2}, .., {0,2}, .., {1}, ..`.
fn subsets_lex(n: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for i in start..n {
            cur.push(i);
            out.push(cur.clone());
            go(i + 1, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity((1 << n) - 1);
    go(0, n, &mut Vec::new(), &mut out);
    out
}

pub fn principal_minor(m: &GramMatrix, idx: &[usize]) -> BigInt {
    let sub: Vec<Vec<BigInt>> = idx
        .iter()
        .map(|&i| idx.iter().map(|&j| m.entries[i][j].clone()).collect())
        .collect();
    bareiss_determinant(&sub)
}

/// A symmetric matrix is PSD iff all of its principal minors are
/// nonnegative; every one of them is evaluated exactly.
pub fn psd_check(m: &GramMatrix) -> Result<PsdVerdict, GramError> {
    let n = m.size();
    if n > MAX_PSD_SIZE {
        return Err(GramError::TooLarge(n));
    }
    let witness = subsets_lex(n)
        .into_iter()
        .find(|s| principal_minor(m, s).is_negative());
    Ok(PsdVerdict {
        psd: witness.is_none(),
        witness,
        determinant: m.determinant(),
    })
}

/// `M[i][i] M[j][j] - M[i][j]^2`.
pub fn schwarz_margin(m: &GramMatrix, i: usize, j: usize) -> Result<BigInt, GramError> {
    let size = m.size();
    for index in [i, j] {
        if index >= size {
            return Err(GramError::IndexOutOfRange { index, size });
        }
    }
    if i == j {
        return Err(GramError::SameIndex);
    }
    let e = &m.entries;
    Ok(&e[i][i] * &e[j][j] - &e[i][j] * &e[i][j])
}

/// Gram matrix of the vectors `sum_k C[r][k] v_k`, i.e. `C M C^T`.
pub fn combined_vector_gram(
    m: &GramMatrix,
    combos: &[Vec<BigInt>],
) -> Result<GramMatrix, GramError> {
    let n = m.size();
    if let Some(c) = combos.iter().find(|c| c.len() != n) {
        return Err(GramError::DimensionMismatch {
            expected: n,
            found: c.len(),
        });
    }
    // C M
    let cm: Vec<Vec<BigInt>> = combos
        .iter()
        .map(|c| {
            (0..n)
                .map(|j| (0..n).map(|k| &c[k] * &m.entries[k][j]).sum())
                .collect()
        })
        .collect();
    let entries: Vec<Vec<BigInt>> = cm
        .iter()
        .map(|row| {
            combos
                .iter()
                .map(|c| (0..n).map(|k| &row[k] * &c[k]).sum())
                .collect()
        })
        .collect();
    let labels = combos
        .iter()
        .map(|c| {
            let terms: Vec<String> = c
                .iter()
                .zip(&m.labels)
                .filter(|(x, _)| !x.is_zero())
                .map(|(x, l)| format!("{x}*{l}"))
                .collect();
            if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join("+")
            }
        })
        .collect();
    Ok(GramMatrix {
        entries,
        labels,
        kind: GramKind::Combined,
        q: m.q.clone(),
        genera: m.genera.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| b(r)).collect()
    }

    /// Cofactor expansion along the first row.
    fn cofactor_det(a: &[Vec<BigInt>]) -> BigInt {
        let n = a.len();
        if n == 0 {
            return BigInt::from(1);
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<BigInt>> = a[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != c)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let term = &a[0][c] * cofactor_det(&minor);
                if c % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .sum()
    }

    #[test]
    fn absolute_examples() {
        let q = BigInt::from(3);
        let m = gram_absolute(&q, 1, &b(&[4, 16]), 2).unwrap();
        assert_eq!(m.entries(), mat(&[&[2, 0, -6], &[0, 6, 0], &[-6, 0, 18]]));
        let m = gram_absolute(&q, 1, &b(&[7, 7]), 2).unwrap();
        assert_eq!(m.entries(), mat(&[&[2, -3, 3], &[-3, 6, -9], &[3, -9, 18]]));
        for q in [3i64, 4, 5, 7] {
            let qb = BigInt::from(q);
            let line = b(&[q + 1, q * q + 1]);
            assert!(gram_absolute(&qb, 0, &line, 2).unwrap().is_zero());
        }
        assert_eq!(
            gram_absolute(&q, 1, &b(&[4]), 2).unwrap_err(),
            GramError::InsufficientCounts {
                needed: 2,
                found: 1
            }
        );
    }

    #[test]
    fn relative_examples() {
        let q = BigInt::from(3);
        let m = gram_relative(&q, 1, 0, &b(&[4, 16]), &b(&[4, 10]), 1).unwrap();
        assert_eq!(m.entries(), mat(&[&[2, 0], &[0, 6]]));
        let m = gram_relative(&q, 1, 0, &b(&[7, 7]), &b(&[4, 10]), 1).unwrap();
        assert_eq!(m.entries(), mat(&[&[2, -3], &[-3, 6]]));
        let same = gram_relative(&q, 2, 2, &b(&[5, 9, 30]), &b(&[5, 9, 30]), 3).unwrap();
        assert!(same.is_zero());
        assert_eq!(
            gram_relative(&q, 0, 1, &b(&[4]), &b(&[4]), 1).unwrap_err(),
            GramError::GenusOrder { gx: 0, gy: 1 }
        );
    }

    #[test]
    fn diagram_examples() {
        let q = BigInt::from(3);
        let (x, y1, y2, z) = (b(&[2]), b(&[4]), b(&[4]), b(&[4]));
        let m = gram_diagram(&q, [3, 1, 0, 0], [&x, &y1, &y2, &z], 1).unwrap();
        assert_eq!(m.entries(), mat(&[&[4, 2], &[2, 12]]));
        // X = Y1 and Y2 = Z gives G = 0, not a negative value
        let flat = gram_diagram(&q, [2, 2, 1, 1], [&x, &x, &z, &z], 1).unwrap();
        assert!(flat.is_zero());
        assert_eq!(
            gram_diagram(&q, [1, 1, 1, 0], [&x, &y1, &y2, &z], 1).unwrap_err(),
            GramError::NegativeRelativeGenus(-1)
        );
        let line = b(&[4, 10]);
        let all_line = gram_diagram(&q, [0; 4], [&line, &line, &line, &line], 2).unwrap();
        assert!(all_line.is_zero());
    }

    #[test]
    fn psd_examples() {
        let q = BigInt::from(3);
        let m = gram_absolute(&q, 1, &b(&[4, 16]), 2).unwrap();
        let v = psd_check(&m).unwrap();
        assert!(v.psd);
        assert_eq!(v.determinant, BigInt::zero());
        let v = psd_check(&GramMatrix::from_rows(q.clone(), mat(&[&[4, 2], &[2, 12]]))).unwrap();
        assert!(v.psd);
        assert_eq!(v.determinant, 44.into());
        let v = psd_check(&GramMatrix::from_rows(q.clone(), mat(&[&[1, 2], &[2, 1]]))).unwrap();
        assert!(!v.psd);
        assert_eq!(v.witness, Some(vec![0, 1]));
        let big = GramMatrix::from_rows(q, vec![vec![BigInt::zero(); 9]; 9]);
        assert_eq!(psd_check(&big).unwrap_err(), GramError::TooLarge(9));
    }

    #[test]
    fn witness_is_lexicographically_first() {
        // minors: {0}=1, {0,1}=1, {0,1,2}<0 comes before {2}<0
        let m = GramMatrix::from_rows(BigInt::from(3), mat(&[&[1, 0, 2], &[0, 1, 0], &[2, 0, -1]]));
        assert_eq!(psd_check(&m).unwrap().witness, Some(vec![0, 1, 2]));
    }

    #[test]
    fn schwarz_examples() {
        let q = BigInt::from(3);
        let m = GramMatrix::from_rows(q.clone(), mat(&[&[2, 0], &[0, 6]]));
        assert_eq!(schwarz_margin(&m, 0, 1).unwrap(), 12.into());
        let m = GramMatrix::from_rows(q.clone(), mat(&[&[2, -3], &[-3, 6]]));
        assert_eq!(schwarz_margin(&m, 0, 1).unwrap(), 3.into());
        let z = GramMatrix::from_rows(q, mat(&[&[0, 0], &[0, 0]]));
        assert_eq!(schwarz_margin(&z, 0, 1).unwrap(), 0.into());
        assert_eq!(
            schwarz_margin(&z, 0, 2).unwrap_err(),
            GramError::IndexOutOfRange { index: 2, size: 2 }
        );
    }

    #[test]
    fn combined_examples() {
        let q = BigInt::from(3);
        let m = gram_absolute(&q, 1, &b(&[4, 16]), 2).unwrap();
        let c = combined_vector_gram(&m, &[b(&[3, 0, 1]), b(&[0, 1, 0])]).unwrap();
        assert_eq!(c.entries(), mat(&[&[0, 0], &[0, 6]]));
        let id = combined_vector_gram(&m, &[b(&[1, 0, 0]), b(&[0, 1, 0]), b(&[0, 0, 1])]).unwrap();
        assert_eq!(id.entries(), m.entries());
        let two = GramMatrix::from_rows(q, mat(&[&[5, 7], &[7, 11]]));
        let s = combined_vector_gram(&two, &[b(&[1, 1])]).unwrap();
        assert_eq!(s.entries(), mat(&[&[5 + 2 * 7 + 11]]));
        assert_eq!(
            combined_vector_gram(&two, &[b(&[1])]).unwrap_err(),
            GramError::DimensionMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(
            n in 1usize..=6,
            seed in prop::collection::vec(-20i64..20, 36),
        ) {
            let a: Vec<Vec<BigInt>> = (0..n)
                .map(|i| (0..n).map(|j| BigInt::from(seed[i * 6 + j])).collect())
                .collect();
            prop_assert_eq!(bareiss_determinant(&a), cofactor_det(&a));
        }

        #[test]
        fn congruence_preserves_psd(
            v in prop::collection::vec(-6i64..6, 9),
            c in prop::collection::vec(-4i64..4, 6),
        ) {
            // V^T V is PSD for any V
            let vm: Vec<Vec<i64>> = v.chunks(3).map(|r| r.to_vec()).collect();
            let rows: Vec<Vec<BigInt>> = (0..3)
                .map(|i| (0..3).map(|j| BigInt::from((0..3).map(|k| vm[k][i] * vm[k][j]).sum::<i64>())).collect())
                .collect();
            let m = GramMatrix::from_rows(BigInt::from(3), rows);
            prop_assert!(psd_check(&m).unwrap().psd);
            let combos: Vec<Vec<BigInt>> = c.chunks(3).map(b).collect();
            prop_assert!(psd_check(&combined_vector_gram(&m, &combos).unwrap()).unwrap().psd);
        }

        #[test]
        fn pythagoras_and_additivity(
            q in prop::sample::select(vec![3i64, 5, 7, 9]),
            g in prop::collection::vec(0u64..5, 4),
            n in prop::collection::vec(0i64..200, 12),
        ) {
            let qb = BigInt::from(q);
            let (gx, gy1, gy2) = (g[0] + g[1] + g[2], g[1], g[2]);
            let series = |o: usize| b(&n[o..o + 3]);
            let (x, y1, y2) = (series(0), series(3), series(6));
            let z: Vec<BigInt> = (1..=3).map(|j| qb.pow(j) + 1).collect();
            let ax = gram_absolute(&qb, gx, &x, 3).unwrap();
            let ay = gram_absolute(&qb, gy1, &y1, 3).unwrap();
            let rel = gram_relative(&qb, gx, gy1, &x, &y1, 3).unwrap();
            for i in 0..4 {
                prop_assert_eq!(rel.get(i, i), &(ax.get(i, i) - ay.get(i, i)));
            }
            let d = gram_diagram(&qb, [gx, gy1, gy2, 0], [&x, &y1, &y2, &z], 3).unwrap();
            let r_xz = gram_relative(&qb, gx, 0, &x, &z, 3).unwrap();
            let r_1z = gram_relative(&qb, gy1, 0, &y1, &z, 3).unwrap();
            let r_2z = gram_relative(&qb, gy2, 0, &y2, &z, 3).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    prop_assert_eq!(d.get(i, j), &(r_xz.get(i, j) - r_1z.get(i, j) - r_2z.get(i, j)));
                }
            }
        }
    }
}
