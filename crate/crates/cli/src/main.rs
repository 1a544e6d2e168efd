//! `weilgram` command line.
//!
//! Exit codes: 0 success, 1 a check failed (or no genus fits the counts),
//! 2 invalid input, 3 enumeration budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

use weilgram::bounds::{full_report, hyperelliptic_report, BoundReport, ReportSubject};
use weilgram::corpus::{self, CorpusSpec, RunOptions};
use weilgram::curves::manifest::{Manifest, Subject};
use weilgram::curves::{
    count_points, count_series, hyperelliptic_cover, Budget, CurveKind, CurveModel,
};
use weilgram::feasibility::{ihara_closed_form, max_n1, FeasibilityProblem};
use weilgram::finite_field::prime_power;
use weilgram::gram::{gram_absolute, gram_diagram, gram_relative, psd_check, GramMatrix};
use weilgram::zeta::{
    check_functional_equation, check_riemann_hypothesis, extrapolate, infer_genus, l_from_counts,
    LPolynomial, DEFAULT_RH_TOL,
};

#[derive(Parser)]
#[command(
    name = "weilgram",
    version,
    about = "Frobenius Gram matrices and point-count bounds"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Global {
    /// Largest number of points a single count may scan.
    #[arg(long, global = true, default_value_t = Budget::default().0)]
    budget: u64,
    /// Tolerance for the Riemann hypothesis check.
    #[arg(long, global = true, default_value_t = DEFAULT_RH_TOL)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print N_j for a curve manifest (the apex X of a diagram).
    Count {
        manifest: PathBuf,
        #[arg(long, default_value_t = 1)]
        ext: usize,
    },
    /// L-polynomial, Riemann hypothesis report and inferred genus.
    Zeta {
        /// Curve manifest; alternatively give --q and --counts.
        manifest: Option<PathBuf>,
        /// Counts N_1..N_m to use (default 2g + 2).
        #[arg(long)]
        max_ext: Option<usize>,
        #[arg(long, requires = "counts", conflicts_with = "manifest")]
        q: Option<u64>,
        /// Comma-separated N_1,N_2,...
        #[arg(long, value_delimiter = ',', requires = "q")]
        counts: Option<Vec<BigInt>>,
    },
    /// Gram matrix of the Frobenius classes.
    Gram {
        manifest: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Default: absolute for curves, diagram for diagrams.
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Bound report; exit 1 if any check fails.
    Bounds {
        manifest: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest N_1 allowed by a positive semidefinite Gram matrix.
    Feasibility {
        q: u64,
        g: u64,
        m: usize,
        /// Drop the conditions N_j >= N_1 and N_j = N_1 (mod j).
        #[arg(long)]
        no_place_counts: bool,
    },
    /// Seeded corpus runs.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Absolute,
    Relative,
    Diagram,
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Generate the corpus, verify it and write report.json, summary.csv
    /// and the instance manifests.
    Run {
        spec: PathBuf,
        #[arg(long, default_value = "corpus-out")]
        out: PathBuf,
        /// Verify instances one at a time.
        #[arg(long)]
        serial: bool,
    },
}

enum Failure {
    /// Exit 1.
    Check,
    /// Exit 2.
    Input(String),
    /// Exit 3.
    Budget(String),
}

impl From<weilgram::Error> for Failure {
    fn from(e: weilgram::Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn lib<T, E: Into<weilgram::Error>>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::from(e.into()))
}

fn io<T>(r: std::io::Result<T>, path: &Path) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Subject, Failure> {
    let text = io(fs::read_to_string(path), path)?;
    let manifest = lib(Manifest::parse(&text))?;
    lib(manifest.build())
}

fn load_curve(path: &Path) -> Result<CurveModel, Failure> {
    Ok(match load(path)? {
        Subject::Curve(c) => c,
        Subject::Diagram(d) => d.x().clone(),
    })
}

fn list<T: std::fmt::Display>(v: &[T]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(","))
}

fn strings<T: std::fmt::Display>(v: &[T]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn ok_if(pass: bool) -> Result<(), Failure> {
    if pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_count(g: Global, path: &Path, ext: usize) -> Result<(), Failure> {
    let curve = load_curve(path)?;
    let n = lib(count_points(&curve, ext, Budget(g.budget)))?;
    match g.format {
        Format::Json => println!(
            "{}",
            json!({ "curve": curve.label(), "j": ext, "N": n.to_string() })
        ),
        _ => println!("N_{ext}={n}"),
    }
    Ok(())
}

struct ZetaOutput {
    counts: Vec<BigInt>,
    l: Option<LPolynomial>,
    expected_genus: Option<u64>,
    inferred: Option<usize>,
}

fn cmd_zeta(
    g: Global,
    path: Option<&Path>,
    max_ext: Option<usize>,
    q: Option<u64>,
    counts: Option<Vec<BigInt>>,
) -> Result<(), Failure> {
    let out = match (path, q, counts) {
        (Some(path), _, _) => {
            let curve = load_curve(path)?;
            let genus = curve.genus() as usize;
            let m = max_ext.unwrap_or(2 * genus + 2);
            if m < genus {
                return Err(Failure::Input(format!(
                    "--max-ext {m} is below the genus {genus}"
                )));
            }
            let counts = lib(count_series(&curve, m, Budget(g.budget)))?
                .counts()
                .to_vec();
            ZetaOutput {
                l: Some(lib(l_from_counts(curve.q(), genus, &counts[..genus]))?),
                inferred: infer_genus(curve.q(), &counts, g.tol),
                expected_genus: Some(genus as u64),
                counts,
            }
        }
        (None, Some(q), Some(counts)) => {
            if prime_power(q).is_none() {
                return Err(Failure::Input(format!("{q} is not a prime power")));
            }
            let qb = BigInt::from(q);
            let inferred = infer_genus(&qb, &counts, g.tol);
            let l = match inferred {
                Some(genus) => Some(lib(l_from_counts(&qb, genus, &counts[..genus]))?),
                None => None,
            };
            ZetaOutput {
                counts,
                l,
                expected_genus: None,
                inferred,
            }
        }
        _ => {
            return Err(Failure::Input(
                "give a manifest or --q with --counts".into(),
            ))
        }
    };
    print_zeta(g, &out)
}

fn print_zeta(g: Global, out: &ZetaOutput) -> Result<(), Failure> {
    let genus_text = out.inferred.map_or("none".to_string(), |x| x.to_string());
    let Some(l) = &out.l else {
        match g.format {
            Format::Json => println!(
                "{}",
                json!({ "counts": strings(&out.counts), "genus": null })
            ),
            _ => println!("N={}\ngenus=none", list(&out.counts)),
        }
        return Err(Failure::Check);
    };
    let rh = lib(check_riemann_hypothesis(l, g.tol))?;
    let fe = check_functional_equation(l);
    let extrap = (1..=out.counts.len()).all(|j| extrapolate(l, j) == out.counts[j - 1]);
    let genus_ok = match out.expected_genus {
        Some(e) => out.inferred == Some(e as usize),
        None => out.inferred.is_some(),
    };
    match g.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "counts": strings(&out.counts),
                "L": strings(l.coeffs()),
                "functional_equation": fe,
                "extrapolation": extrap,
                "rh": { "pass": rh.pass, "max_deviation": rh.max_deviation, "moduli": rh.moduli },
                "genus": out.inferred,
            }))
            .expect("json")
        ),
        _ => {
            println!("N={}", list(&out.counts));
            println!("L={}", list(l.coeffs()));
            println!("functional_equation={fe}");
            println!("extrapolation={extrap}");
            println!(
                "rh={} max_deviation={:e}",
                if rh.pass { "pass" } else { "fail" },
                rh.max_deviation
            );
            println!("genus={genus_text}");
        }
    }
    ok_if(rh.pass && fe && extrap && genus_ok)
}

fn cmd_gram(g: Global, path: &Path, order: usize, kind: Option<Kind>) -> Result<(), Failure> {
    let budget = Budget(g.budget);
    let counts = |c: &CurveModel| -> Result<Vec<BigInt>, Failure> {
        Ok(lib(count_series(c, order, budget))?.counts().to_vec())
    };
    let matrix: GramMatrix = match (load(path)?, kind) {
        (Subject::Curve(c), None | Some(Kind::Absolute)) => {
            lib(gram_absolute(c.q(), c.genus(), &counts(&c)?, order))?
        }
        (Subject::Diagram(d), Some(Kind::Absolute)) => {
            let x = d.x();
            lib(gram_absolute(x.q(), x.genus(), &counts(x)?, order))?
        }
        (Subject::Curve(c), Some(Kind::Relative)) => {
            if !matches!(c.kind(), CurveKind::Hyperelliptic { .. }) {
                return Err(Failure::Input(
                    "relative Gram matrices need a hyperelliptic curve or a diagram".into(),
                ));
            }
            let cover = lib(hyperelliptic_cover(&c))?;
            let y = cover.target();
            lib(gram_relative(
                c.q(),
                c.genus(),
                y.genus(),
                &counts(&c)?,
                &counts(y)?,
                order,
            ))?
        }
        (Subject::Diagram(d), Some(Kind::Relative)) => {
            let (x, z) = (d.x(), d.z());
            lib(gram_relative(
                x.q(),
                x.genus(),
                z.genus(),
                &counts(x)?,
                &counts(z)?,
                order,
            ))?
        }
        (Subject::Diagram(d), None | Some(Kind::Diagram)) => {
            let n = [d.x(), d.y1(), d.y2(), d.z()]
                .iter()
                .map(|c| counts(c))
                .collect::<Result<Vec<_>, _>>()?;
            lib(gram_diagram(
                d.x().q(),
                d.genera(),
                [&n[0], &n[1], &n[2], &n[3]],
                order,
            ))?
        }
        (Subject::Curve(_), Some(Kind::Diagram)) => {
            return Err(Failure::Input(
                "diagram Gram matrices need a biquadratic manifest".into(),
            ))
        }
    };
    let verdict = lib(psd_check(&matrix))?;
    match g.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "gram": matrix,
                "psd": verdict.psd,
                "witness": verdict.witness,
                "determinant": verdict.determinant.to_string(),
            }))
            .expect("json")
        ),
        _ => {
            println!("{matrix}");
            println!("psd={}", verdict.psd);
            println!("determinant={}", verdict.determinant);
        }
    }
    ok_if(verdict.psd)
}

fn render_report(report: &BoundReport, format: Format) -> String {
    match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
        Format::Text => {
            let mut s = format!("subject={}\n", report.subject);
            for c in &report.checks {
                s.push_str(&format!(
                    "{}: {} <= {} holds={} margin={}\n",
                    c.name, c.lhs, c.rhs, c.holds, c.margin
                ));
            }
            s.push_str(&format!("all_hold={}\n", report.all_hold()));
            s
        }
    }
}

fn cmd_bounds(g: Global, path: &Path, order: usize, out: Option<&Path>) -> Result<(), Failure> {
    let budget = Budget(g.budget);
    let report = match load(path)? {
        Subject::Curve(c) if matches!(c.kind(), CurveKind::Hyperelliptic { .. }) => {
            lib(hyperelliptic_report(&c, order, budget))?
        }
        Subject::Curve(c) => lib(full_report(ReportSubject::Curve(&c), order, budget))?,
        Subject::Diagram(d) => lib(full_report(ReportSubject::Diagram(&d), order, budget))?,
    };
    let text = render_report(&report, g.format);
    match out {
        Some(p) => io(fs::write(p, text), p)?,
        None => print!("{text}"),
    }
    ok_if(report.all_hold())
}

fn cmd_feasibility(g: Global, q: u64, genus: u64, m: usize, place: bool) -> Result<(), Failure> {
    let problem = FeasibilityProblem {
        place_counts: place,
        ..FeasibilityProblem::new(q, genus, m)
    };
    let r = lib(max_n1(&problem))?;
    let ihara = (genus > 0).then(|| ihara_closed_form(q, genus).expect("genus is positive"));
    match g.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "q": q,
                "g": genus,
                "m": m,
                "max_N1": r.max_n1.to_string(),
                "witness": strings(&r.witness),
                "scanned": r.scanned,
                "ihara_floor": ihara.as_ref().map(|b| b.floor.to_string()),
                "ihara": ihara.as_ref().map(|b| b.to_f64()),
            }))
            .expect("json")
        ),
        _ => {
            println!("max_N1={}", r.max_n1);
            println!("witness={}", list(&r.witness));
            println!("scanned={}", r.scanned);
            if let Some(b) = &ihara {
                println!("ihara_floor={}", b.floor);
                println!("ihara={:.6}", b.to_f64());
            }
        }
    }
    Ok(())
}

fn cmd_corpus_run(g: Global, spec_path: &Path, out: &Path, serial: bool) -> Result<(), Failure> {
    let text = io(fs::read_to_string(spec_path), spec_path)?;
    let spec = lib(CorpusSpec::parse(&text))?;
    let opts = RunOptions {
        budget: Budget(g.budget),
        tol: g.tol,
        parallel: !serial,
    };
    let run = lib(corpus::run(&spec, &opts))?;
    let manifests = out.join("manifests");
    io(fs::create_dir_all(&manifests), &manifests)?;
    for (i, inst) in run.instances.iter().enumerate() {
        let p = manifests.join(format!("{i:03}-{}.json", inst.family()));
        io(fs::write(&p, inst.manifest().to_json() + "\n"), &p)?;
    }
    let report_path = out.join("report.json");
    io(fs::write(&report_path, run.report.to_json()), &report_path)?;
    let summary_path = out.join("summary.csv");
    let summary = run.report.summary_csv();
    io(fs::write(&summary_path, &summary), &summary_path)?;
    match g.format {
        Format::Csv => print!("{summary}"),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "instances": run.report.instances.len(),
                "summary": run.report.summary,
                "all_pass": run.report.all_pass(),
            }))
            .expect("json")
        ),
        Format::Text => {
            println!("instances={}", run.report.instances.len());
            for (name, t) in &run.report.summary {
                println!("{name}={}/{}", t.passed, t.total);
            }
            println!("all_pass={}", run.report.all_pass());
        }
    }
    ok_if(run.report.all_pass())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let g = cli.global;
    if !(g.tol.is_finite() && g.tol > 0.0) {
        return Err(Failure::Input(format!(
            "--tol must be positive, got {}",
            g.tol
        )));
    }
    match cli.command {
        Command::Count { manifest, ext } => cmd_count(g, &manifest, ext),
        Command::Zeta {
            manifest,
            max_ext,
            q,
            counts,
        } => cmd_zeta(g, manifest.as_deref(), max_ext, q, counts),
        Command::Gram {
            manifest,
            order,
            kind,
        } => cmd_gram(g, &manifest, order, kind),
        Command::Bounds {
            manifest,
            order,
            out,
        } => cmd_bounds(g, &manifest, order, out.as_deref()),
        Command::Feasibility {
            q,
            g: genus,
            m,
            no_place_counts,
        } => cmd_feasibility(g, q, genus, m, !no_place_counts),
        Command::Corpus {
            action: CorpusAction::Run { spec, out, serial },
        } => cmd_corpus_run(g, &spec, &out, serial),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
