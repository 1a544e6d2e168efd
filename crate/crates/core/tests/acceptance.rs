//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use sha2::{Digest, Sha256};

use weilgram::bounds::{check_diagram, check_relative, check_relative_second, weil_interval};
use weilgram::corpus::{run, CorpusReport, CorpusRun, CorpusSpec, Instance, RunOptions};
use weilgram::curves::{
    count_points, hyperelliptic_cover, make_biquadratic, make_hyperelliptic, make_projective_line,
    Budget, CurveError,
};
use weilgram::feasibility::{ihara_closed_form, max_n1, FeasibilityProblem};
use weilgram::finite_field::{construct_field, prime_power, FieldSpec};
use weilgram::gram::{gram_absolute, psd_check};
use weilgram::poly::Poly;

const CORPUS_LIMIT: Duration = Duration::from_secs(300);
const FEASIBILITY_LIMIT: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn b(v: i64) -> BigInt {
    BigInt::from(v)
}

fn field(p: u64, k: usize) -> FieldSpec {
    construct_field(p, k).unwrap()
}

struct Corpus {
    run: CorpusRun,
    elapsed: Duration,
}

fn corpus() -> &'static Corpus {
    static C: OnceLock<Corpus> = OnceLock::new();
    C.get_or_init(|| {
        let start = Instant::now();
        let run =
            run(&CorpusSpec::standard(), &RunOptions::default()).expect("standard corpus runs");
        Corpus {
            run,
            elapsed: start.elapsed(),
        }
    })
}

fn report() -> &'static CorpusReport {
    &corpus().run.report
}

/// `(passed, total)` for a named check across the corpus.
fn tally(name: &str) -> (u64, u64) {
    report()
        .summary
        .get(name)
        .map_or((0, 0), |t| (t.passed, t.total))
}

fn all_pass(name: &str) -> Result<u64, String> {
    let (p, t) = tally(name);
    ensure(t > 0, || format!("no {name} checks ran"))?;
    ensure(p == t, || format!("{name}: {p}/{t} passed"))?;
    Ok(t)
}

fn elliptic_f3() -> weilgram::curves::CurveModel {
    make_hyperelliptic(&field(3, 1), &Poly::from_signed(3, &[0, 1, 0, 1])).unwrap()
}

fn zeta_consistency() -> Outcome {
    let c = corpus();
    let curves: Vec<_> = c
        .run
        .instances
        .iter()
        .filter_map(|i| match i {
            Instance::Curve(m) => Some(m),
            Instance::Diagram(_) => None,
        })
        .collect();
    ensure(curves.len() >= 30, || {
        format!("only {} curves", curves.len())
    })?;
    let qs: BTreeSet<BigInt> = curves.iter().map(|m| m.q().clone()).collect();
    let want: BTreeSet<BigInt> = [3, 5, 7, 9].into_iter().map(b).collect();
    ensure(qs == want, || format!("fields covered: {qs:?}"))?;
    ensure(curves.iter().all(|m| m.genus() <= 4), || {
        "genus above 4".into()
    })?;
    for r in report()
        .instances
        .iter()
        .filter(|r| r.family != "biquadratic")
    {
        let z = &r.zeta[0];
        ensure(z.compared_up_to == 2 * r.genus as usize + 2, || {
            format!("{} compared only up to {}", r.label, z.compared_up_to)
        })?;
    }
    let n = all_pass("zeta_consistency")?;
    all_pass("genus_inference")?;
    ensure(c.elapsed < CORPUS_LIMIT, || {
        format!("corpus took {:?}", c.elapsed)
    })?;
    Ok(format!(
        "{} curves, {n} extrapolation checks, {:.1}s",
        curves.len(),
        c.elapsed.as_secs_f64()
    ))
}

fn riemann_hypothesis() -> Outcome {
    let n = all_pass("riemann_hypothesis")?;
    let mut worst = 0.0f64;
    for r in &report().instances {
        for z in &r.zeta {
            let d: f64 = z
                .rh_max_deviation
                .parse()
                .map_err(|_| format!("{}: deviation {}", z.curve, z.rh_max_deviation))?;
            ensure(d <= 1e-9, || format!("{}: deviation {d}", z.curve))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("{n} L-polynomials, worst deviation {worst:.1e}"))
}

fn weil() -> Outcome {
    let n = all_pass("weil")?;
    let e = elliptic_f3();
    let n2 = count_points(&e, 2, Budget::default()).map_err(|x| x.to_string())?;
    let (lo, hi) = weil_interval(e.q(), 1, 2);
    ensure((lo.clone(), hi.clone()) == (b(4), b(16)), || {
        format!("interval [{lo}, {hi}]")
    })?;
    ensure(n2 == hi, || format!("N_2 = {n2}"))?;
    Ok(format!(
        "{n} reports hold, y^2 = x^3 + x over F_3 has N_2 = 16 = upper end"
    ))
}

fn relative() -> Outcome {
    let n = all_pass("relative")?;
    // search for a maximal elliptic curve over F_3
    let f3 = field(3, 1);
    let mut best: Option<(BigInt, weilgram::curves::CurveModel)> = None;
    for c in 0..3 {
        for bb in 0..3 {
            for a in 0..3 {
                if let Ok(e) = make_hyperelliptic(&f3, &Poly::new(3, vec![c, bb, a, 1])) {
                    let n1 = count_points(&e, 1, Budget::default()).unwrap();
                    if best.as_ref().is_none_or(|(m, _)| n1 > *m) {
                        best = Some((n1, e));
                    }
                }
            }
        }
    }
    let (n1, e) = best.ok_or("no elliptic curve found")?;
    ensure(n1 == b(7), || format!("maximal N_1 = {n1}"))?;
    let cover = hyperelliptic_cover(&e).map_err(|x| x.to_string())?;
    let n1y = count_points(cover.target(), 1, Budget::default()).unwrap();
    let rec = check_relative(e.q(), 1, 0, &n1, &n1y).map_err(|x| x.to_string())?;
    ensure(rec.holds && &rec.rhs - &rec.lhs == b(3), || {
        format!("margin {}", rec.margin)
    })?;
    Ok(format!(
        "{n} checks hold, {} over P^1 has margin 3",
        e.label()
    ))
}

fn relative_second() -> Outcome {
    let n = all_pass("relative_second")?;
    let e = elliptic_f3();
    let line = make_projective_line(&field(3, 1));
    let nx: Vec<BigInt> = (1..=2)
        .map(|j| count_points(&e, j, Budget::default()).unwrap())
        .collect();
    let ny: Vec<BigInt> = (1..=2)
        .map(|j| count_points(&line, j, Budget::default()).unwrap())
        .collect();
    ensure(nx == [b(4), b(16)] && ny == [b(4), b(10)], || {
        format!("{nx:?} / {ny:?}")
    })?;
    let rec = check_relative_second(e.q(), 1, 0, (&nx[0], &nx[1]), (&ny[0], &ny[1]))
        .map_err(|x| x.to_string())?;
    ensure(rec.holds && rec.lhs == rec.rhs, || {
        format!("margin {}", rec.margin)
    })?;
    Ok(format!("{n} checks hold, equality for (4,16)/(4,10)"))
}

fn diagram() -> Outcome {
    let small: BTreeSet<BigInt> = [3, 5, 7].into_iter().map(b).collect();
    let diagrams = report()
        .instances
        .iter()
        .filter(|r| r.family == "biquadratic" && small.contains(&r.q))
        .count();
    ensure(diagrams >= 20, || {
        format!("only {diagrams} diagrams over F_3/F_5/F_7")
    })?;
    all_pass("diagram")?;
    let d = make_biquadratic(
        &field(3, 1),
        &Poly::from_signed(3, &[0, 1, 0, 1]),
        &Poly::from_signed(3, &[2, 1, 1]),
    )
    .map_err(|x| x.to_string())?;
    let n: Vec<BigInt> = [d.x(), d.y1(), d.y2(), d.z()]
        .iter()
        .map(|c| count_points(c, 1, Budget::default()).unwrap())
        .collect();
    ensure(n == [b(2), b(4), b(4), b(4)], || format!("counts {n:?}"))?;
    let rec = check_diagram(
        d.x().q(),
        d.genera(),
        [&n[0], &n[1], &n[2], &n[3]],
        d.certificate(),
    )
    .map_err(|x| x.to_string())?;
    ensure(rec.lhs == b(4) && rec.rhs == b(48) && rec.holds, || {
        format!("lhs {} rhs {}", rec.lhs, rec.rhs)
    })?;
    Ok(format!(
        "{diagrams} diagrams hold, example |2-4-4+4|^2 = 4 <= 48"
    ))
}

fn trace_identity() -> Outcome {
    let n = all_pass("trace_identity")?;
    let per = weilgram::corpus::diagram_length(CorpusSpec::standard().order);
    ensure(per >= 2, || "fewer than two extensions".into())?;
    Ok(format!("{n} identities for j <= {per}"))
}

fn gram_psd() -> Outcome {
    ensure(CorpusSpec::standard().order == 3, || {
        "corpus order is not 3".into()
    })?;
    let a = all_pass("gram_absolute_psd")?;
    let r = all_pass("gram_relative_psd")?;
    let d = all_pass("gram_diagram_psd")?;
    let g = gram_absolute(&b(3), 1, &[b(4), b(16)], 2).map_err(|x| x.to_string())?;
    let want = vec![
        vec![b(2), b(0), b(-6)],
        vec![b(0), b(6), b(0)],
        vec![b(-6), b(0), b(18)],
    ];
    ensure(g.entries() == want.as_slice(), || format!("gram {g}"))?;
    let v = psd_check(&g).map_err(|x| x.to_string())?;
    ensure(v.psd && v.determinant == b(0), || format!("verdict {v:?}"))?;
    Ok(format!(
        "{a} absolute, {r} relative, {d} diagram matrices PSD, supersingular det 0"
    ))
}

fn equivalence() -> Outcome {
    let n = all_pass("gram_bounds_equivalence")?;
    let covers = report()
        .instances
        .iter()
        .filter(|r| r.family != "plane")
        .count();
    Ok(format!("{n} exact agreements over {covers} instances"))
}

fn timed(p: FeasibilityProblem) -> Result<BigInt, String> {
    let start = Instant::now();
    let r = max_n1(&p).map_err(|x| x.to_string())?;
    let t = start.elapsed();
    ensure(t <= FEASIBILITY_LIMIT, || format!("{p:?} took {t:?}"))?;
    Ok(r.max_n1)
}

fn feasibility() -> Outcome {
    ensure(timed(FeasibilityProblem::new(3, 1, 1))? == b(7), || {
        "max_n1(3,1,1)".into()
    })?;
    let r = max_n1(&FeasibilityProblem::new(3, 1, 2)).map_err(|x| x.to_string())?;
    ensure(r.max_n1 == b(7) && r.witness == [b(7), b(7)], || {
        format!("{r:?}")
    })?;
    let qs: Vec<u64> = (2..=16).filter(|&q| prime_power(q).is_some()).collect();
    let mut runs = 2;
    for &q in &qs {
        for m in 1..=3 {
            let n = timed(FeasibilityProblem::new(q, 0, m))?;
            ensure(n == b(q as i64 + 1), || format!("max_n1({q},0,{m}) = {n}"))?;
            runs += 1;
        }
        for g in 1..=4 {
            let n = timed(FeasibilityProblem::new(q, g, 2))?;
            let bound = ihara_closed_form(q, g).map_err(|x| x.to_string())?;
            ensure(n <= bound.floor, || {
                format!("max_n1({q},{g},2) = {n} > {}", bound.floor)
            })?;
            runs += 1;
        }
    }
    Ok(format!(
        "{runs} runs, each under {}s",
        FEASIBILITY_LIMIT.as_secs()
    ))
}

fn degenerate_diagrams() -> Outcome {
    let f3 = field(3, 1);
    // x^3 + x = x (x^2 + 1) and x^2 + x = x (x + 1) share the factor x
    let shared = make_biquadratic(
        &f3,
        &Poly::from_signed(3, &[0, 1, 0, 1]),
        &Poly::from_signed(3, &[0, 1, 1]),
    );
    ensure(shared == Err(CurveError::NotCoprime), || {
        format!("{shared:?}")
    })?;
    let f = Poly::from_signed(3, &[0, 1, 0, 1]);
    let same = make_biquadratic(&f3, &f, &f);
    ensure(same.is_err(), || "f = g accepted".into())?;
    let g = Poly::from_signed(3, &[2, 1, 1]);
    let same_even = make_biquadratic(&f3, &g, &g);
    ensure(same_even.is_err(), || "f = g accepted".into())?;
    Ok(format!(
        "shared factor: {}, f = g: {}",
        shared.unwrap_err(),
        same.unwrap_err()
    ))
}

fn digest(r: &CorpusReport) -> String {
    let mut h = Sha256::new();
    h.update(r.to_json().as_bytes());
    h.update(r.summary_csv().as_bytes());
    format!("{:x}", h.finalize())
}

fn determinism() -> Outcome {
    let first = digest(report());
    let again = run(&CorpusSpec::standard(), &RunOptions::default()).map_err(|x| x.to_string())?;
    let serial = run(
        &CorpusSpec::standard(),
        &RunOptions {
            parallel: false,
            ..RunOptions::default()
        },
    )
    .map_err(|x| x.to_string())?;
    let (d2, d3) = (digest(&again.report), digest(&serial.report));
    ensure(first == d2, || format!("runs differ: {first} vs {d2}"))?;
    ensure(first == d3, || format!("serial differs: {first} vs {d3}"))?;
    Ok(format!("sha256 {}", &first[..16]))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("zeta consistency", zeta_consistency),
        ("riemann hypothesis", riemann_hypothesis),
        ("weil bound", weil),
        ("relative bound", relative),
        ("second-order relative bound", relative_second),
        ("diagram bound", diagram),
        ("trace identity", trace_identity),
        ("gram psd", gram_psd),
        ("gram/bounds equivalence", equivalence),
        ("feasibility", feasibility),
        ("degenerate diagram rejection", degenerate_diagrams),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
