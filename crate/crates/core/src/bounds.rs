//! The Weil bound and its relative, second-order and square-diagram
//! refinements, evaluated as exact integer comparisons.
//!
//! Every bound of the form `|D| <= 2 c sqrt(q)` is checked as `D^2 <= 4 c^2 q`;
//! the second-order bound is cleared of its denominator. Margins are
//! `rhs - lhs` in that squared or cleared scale, so a check holds iff its
//! margin is nonnegative.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

pub use crate::curves::Certificate;
use crate::curves::{
    count_series, hyperelliptic_cover, Budget, CoverData, CurveError, CurveModel, DiagramData,
};
use crate::gram::{
    diagram_genus, gram_absolute, gram_diagram, gram_relative, principal_minor, GramError,
    GramMatrix,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("gX = {gx} is smaller than gY = {gy}")]
    GenusOrder { gx: u64, gy: u64 },
    #[error("the second-order relative bound needs gX != gY")]
    EqualGenera,
    #[error(
        "diagram certificate is false: the fiber product must be absolutely irreducible and smooth"
    )]
    InvalidDiagram,
    #[error("gX - gY1 - gY2 + gZ = {0} is negative")]
    NegativeRelativeGenus(i64),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Gram(#[from] GramError),
}

/// One exact comparison `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    #[serde(serialize_with = "crate::serde_str::one")]
    pub lhs: BigInt,
    #[serde(serialize_with = "crate::serde_str::one")]
    pub rhs: BigInt,
    pub holds: bool,
    #[serde(serialize_with = "crate::serde_str::one")]
    pub margin: BigRational,
    pub scale: String,
}

impl CheckRecord {
    fn new(name: String, lhs: BigInt, rhs: BigInt, scale: &str) -> Self {
        let margin = BigRational::from_integer(&rhs - &lhs);
        CheckRecord {
            name,
            holds: lhs <= rhs,
            lhs,
            rhs,
            margin,
            scale: scale.to_string(),
        }
    }
}

const SQUARED: &str = "squared";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub subject: String,
    pub checks: Vec<CheckRecord>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Columns `subject,name,lhs,rhs,holds,margin,scale`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["subject", "name", "lhs", "rhs", "holds", "margin", "scale"])
            .expect("in-memory write");
        for c in &self.checks {
            w.write_record([
                self.subject.as_str(),
                &c.name,
                &c.lhs.to_string(),
                &c.rhs.to_string(),
                if c.holds { "true" } else { "false" },
                &c.margin.to_string(),
                &c.scale,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// `[q^j + 1 - isqrt(4 g^2 q^j), q^j + 1 + isqrt(4 g^2 q^j)]`.
pub fn weil_interval(q: &BigInt, g: u64, j: usize) -> (BigInt, BigInt) {
    let qj = q.pow(j as u32);
    let r = (BigInt::from(4 * g * g) * &qj).sqrt();
    (&qj + 1 - &r, &qj + 1 + &r)
}

/// `(N_j - q^j - 1)^2 <= 4 g^2 q^j`.
pub fn check_weil(q: &BigInt, g: u64, j: usize, n: &BigInt) -> CheckRecord {
    let qj = q.pow(j as u32);
    let d: BigInt = n - &qj - 1;
    CheckRecord::new(
        format!("weil j={j}"),
        &d * &d,
        BigInt::from(4 * g * g) * qj,
        SQUARED,
    )
}

/// `(N1X - N1Y)^2 <= 4 (gX - gY)^2 q` for a cover `X -> Y`.
pub fn check_relative(
    q: &BigInt,
    gx: u64,
    gy: u64,
    n1x: &BigInt,
    n1y: &BigInt,
) -> Result<CheckRecord, BoundError> {
    if gx < gy {
        return Err(BoundError::GenusOrder { gx, gy });
    }
    let d: BigInt = n1x - n1y;
    let dg = BigInt::from(gx - gy);
    Ok(CheckRecord::new(
        "relative".into(),
        &d * &d,
        4 * &dg * &dg * q,
        SQUARED,
    ))
}

/// `N2X - N2Y <= 2 (gX - gY) q - (N1X - N1Y)^2 / (gX - gY)`, checked as
/// `(N2X - N2Y) G <= 2 G^2 q - (N1X - N1Y)^2` with `G = gX - gY > 0`. The
/// margin is reported back in the scale of the counts, `(rhs - lhs) / G`.
pub fn check_relative_second(
    q: &BigInt,
    gx: u64,
    gy: u64,
    nx: (&BigInt, &BigInt),
    ny: (&BigInt, &BigInt),
) -> Result<CheckRecord, BoundError> {
    if gx == gy {
        return Err(BoundError::EqualGenera);
    }
    if gx < gy {
        return Err(BoundError::GenusOrder { gx, gy });
    }
    let big_g = BigInt::from(gx - gy);
    let d1: BigInt = nx.0 - ny.0;
    let d2: BigInt = nx.1 - ny.1;
    let lhs = &d2 * &big_g;
    let rhs = 2 * &big_g * &big_g * q - &d1 * &d1;
    let mut rec = CheckRecord::new("relative_second".into(), lhs, rhs, "cleared by gX-gY");
    rec.margin = BigRational::new(&rec.rhs - &rec.lhs, big_g);
    Ok(rec)
}

/// `(NX - NY1 - NY2 + NZ)^2 <= 4 G^2 q` with `G = gX - gY1 - gY2 + gZ`.
pub fn check_diagram(
    q: &BigInt,
    genera: [u64; 4],
    counts: [&BigInt; 4],
    certificate: Certificate,
) -> Result<CheckRecord, BoundError> {
    if !certificate.is_valid() {
        return Err(BoundError::InvalidDiagram);
    }
    let big_g = diagram_genus(genera);
    if big_g < 0 {
        return Err(BoundError::NegativeRelativeGenus(big_g));
    }
    let [x, y1, y2, z] = counts;
    let d: BigInt = x - y1 - y2 + z;
    let g = BigInt::from(big_g);
    Ok(CheckRecord::new(
        "diagram".into(),
        &d * &d,
        4 * &g * &g * q,
        SQUARED,
    ))
}

/// `0 <= min principal minor`, recorded as a check.
pub fn psd_record(name: String, m: &GramMatrix) -> Result<CheckRecord, BoundError> {
    let n = m.size();
    if n > crate::gram::MAX_PSD_SIZE {
        return Err(GramError::TooLarge(n).into());
    }
    let min = (1u32..(1 << n))
        .map(|mask| {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            principal_minor(m, &idx)
        })
        .min()
        .unwrap_or_else(BigInt::zero);
    Ok(CheckRecord::new(
        name,
        BigInt::zero(),
        min,
        "minimum principal minor",
    ))
}

pub enum ReportSubject<'a> {
    Curve(&'a CurveModel),
    Cover(&'a CoverData),
    Diagram(&'a DiagramData),
}

fn with_prefix(prefix: &str, mut rec: CheckRecord) -> CheckRecord {
    rec.name = format!("{prefix} {}", rec.name);
    rec
}

fn weil_checks(prefix: &str, c: &CurveModel, counts: &[BigInt]) -> Vec<CheckRecord> {
    counts
        .iter()
        .enumerate()
        .map(|(i, n)| with_prefix(prefix, check_weil(c.q(), c.genus(), i + 1, n)))
        .collect()
}

/// Relative checks for `X -> Y` over each `F_{q^j}`, `j <= m`, the
/// second-order check over `F_q` when the genera differ, and the PSD check
/// of the relative Gram matrix of order `m`.
fn cover_checks(
    prefix: &str,
    x: &CurveModel,
    y: &CurveModel,
    nx: &[BigInt],
    ny: &[BigInt],
) -> Result<Vec<CheckRecord>, BoundError> {
    let q = x.q();
    let (gx, gy) = (x.genus(), y.genus());
    let mut out = Vec::new();
    for j in 1..=nx.len() {
        let mut rec = check_relative(&q.pow(j as u32), gx, gy, &nx[j - 1], &ny[j - 1])?;
        rec.name = format!("{prefix} relative j={j}");
        out.push(rec);
    }
    if gx != gy && nx.len() >= 2 {
        let rec = check_relative_second(q, gx, gy, (&nx[0], &nx[1]), (&ny[0], &ny[1]))?;
        out.push(with_prefix(prefix, rec));
    }
    let m = nx.len();
    let gram = gram_relative(q, gx, gy, nx, ny, m)?;
    out.push(psd_record(
        format!("{prefix} psd gram_relative m={m}"),
        &gram,
    )?);
    Ok(out)
}

pub fn curve_report(c: &CurveModel, n: &[BigInt]) -> BoundReport {
    BoundReport {
        subject: c.label().to_string(),
        checks: weil_checks("X", c, n),
    }
}

/// `nx` and `ny` hold `N_1..N_m` of source and target, `m >= 1`.
pub fn cover_report(
    cover: &CoverData,
    nx: &[BigInt],
    ny: &[BigInt],
) -> Result<BoundReport, BoundError> {
    let (x, y) = (cover.source(), cover.target());
    let mut checks = weil_checks("X", x, nx);
    checks.extend(weil_checks("Y", y, ny));
    checks.extend(cover_checks("X/Y", x, y, nx, ny)?);
    Ok(BoundReport {
        subject: cover.label(),
        checks,
    })
}

/// `n` holds `N_1..N_m` of `X, Y1, Y2, Z`.
pub fn diagram_report(d: &DiagramData, n: [&[BigInt]; 4]) -> Result<BoundReport, BoundError> {
    let curves = [d.x(), d.y1(), d.y2(), d.z()];
    let names = ["X", "Y1", "Y2", "Z"];
    let m = n[0].len();
    let mut checks = Vec::new();
    for ((c, name), nc) in curves.iter().zip(names).zip(n) {
        checks.extend(weil_checks(name, c, nc));
    }
    let q = d.x().q();
    for j in 1..=m {
        let mut rec = check_diagram(
            &q.pow(j as u32),
            d.genera(),
            [&n[0][j - 1], &n[1][j - 1], &n[2][j - 1], &n[3][j - 1]],
            d.certificate(),
        )?;
        rec.name = format!("diagram j={j}");
        checks.push(rec);
    }
    for ((c, name), nc) in curves.iter().zip(names).zip(n) {
        let gram = gram_absolute(q, c.genus(), nc, m)?;
        checks.push(psd_record(
            format!("{name} psd gram_absolute m={m}"),
            &gram,
        )?);
    }
    for (src, dst) in [(0, 3), (1, 3), (2, 3), (0, 1), (0, 2)] {
        let gram = gram_relative(
            q,
            curves[src].genus(),
            curves[dst].genus(),
            n[src],
            n[dst],
            m,
        )?;
        checks.push(psd_record(
            format!("{}/{} psd gram_relative m={m}", names[src], names[dst]),
            &gram,
        )?);
    }
    let gram = gram_diagram(q, d.genera(), n, m)?;
    checks.push(psd_record(format!("psd gram_diagram m={m}"), &gram)?);
    Ok(BoundReport {
        subject: d.label().to_string(),
        checks,
    })
}

/// Every applicable check for `subject`, using `N_1..N_m` (at least `N_1`
/// and `N_2` for covers, which the second-order bound needs).
pub fn full_report(
    subject: ReportSubject<'_>,
    m: usize,
    budget: Budget,
) -> Result<BoundReport, BoundError> {
    let m = m.max(1);
    let counts = |c: &CurveModel, len: usize| -> Result<Vec<BigInt>, BoundError> {
        Ok(count_series(c, len, budget)?.counts().to_vec())
    };
    match subject {
        ReportSubject::Curve(c) => Ok(curve_report(c, &counts(c, m)?)),
        ReportSubject::Cover(cover) => {
            let len = m.max(2);
            let nx = counts(cover.source(), len)?;
            let ny = counts(cover.target(), len)?;
            cover_report(cover, &nx, &ny)
        }
        ReportSubject::Diagram(d) => {
            let n: Vec<Vec<BigInt>> = [d.x(), d.y1(), d.y2(), d.z()]
                .iter()
                .map(|c| counts(c, m))
                .collect::<Result<_, _>>()?;
            diagram_report(d, [&n[0], &n[1], &n[2], &n[3]])
        }
    }
}

/// Report for a hyperelliptic curve viewed as a double cover of the line.
pub fn hyperelliptic_report(
    c: &CurveModel,
    m: usize,
    budget: Budget,
) -> Result<BoundReport, BoundError> {
    let cover = hyperelliptic_cover(c)?;
    full_report(ReportSubject::Cover(&cover), m, budget)
}
