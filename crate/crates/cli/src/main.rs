//! `nilgraded`: command line access to reductions, orbits, isomorphism
//! tests and the `4 × 4` classification.

mod suites;

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nilgraded::algebra::{iso_search, Absence, AlgebraError, IsoConfig, IsoOutcome, DEFAULT_CAP};
use nilgraded::classify4::{
    canonical_rep, complex_canonical, count_n4, in_region_u, infinite_family, normalize_p_steps,
    representatives_n4, simplify_normalized, CFamily, Policy,
};
use nilgraded::eto::{orbit, reduce_to_2ref, EtoTrace};
use nilgraded::{Field, Slt};

#[derive(Debug, Parser)]
#[command(name = "nilgraded", version, about = "Triangular matrix encodings of nil graded algebras")]
struct Cli {
    /// Ground field: f<p>, q or qi. Overrides the field named in a matrix file.
    #[arg(long, global = true)]
    field: Option<Field>,
    /// Maximum column candidates tried by the isomorphism search.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = suites::DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reduce a matrix to 2-REF and then to normalized form.
    Reduce { matrix: PathBuf },
    /// Normalize a 2-REF matrix; for n = 4 also name its class.
    Normalize { matrix: PathBuf },
    /// Decide whether two matrices give isomorphic algebras.
    Iso { a: PathBuf, b: PathBuf },
    /// Orbit of a matrix under ETOs over a finite field.
    Orbit { matrix: PathBuf },
    /// Count the classes of 4x4 matrices over F_q in three ways.
    Count {
        #[arg(long = "q", value_delimiter = ',', required = true)]
        q: Vec<u64>,
    },
    /// Representatives of every 4x4 class.
    Reps,
    /// The canonical C parameter of a Gaussian rational.
    ComplexCanon {
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
    /// Pairwise inequivalent C parameters over Q.
    InfiniteFamily {
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Run a named check suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(String),
    Inconclusive(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Failed(_) => 2,
            CliError::Inconclusive(_) => 3,
        }
    }
}

fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

type CmdResult = Result<(), CliError>;

fn read_matrix(path: &PathBuf, field: Option<Field>) -> Result<Slt, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let t = Slt::parse_any(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    match field {
        Some(f) if f != t.field() => {
            let mut doc = t.to_doc();
            doc.field = f;
            Slt::from_doc(&doc).map_err(usage)
        }
        _ => Ok(t),
    }
}

fn policy_json() -> Value {
    serde_json::to_value(Policy::default()).expect("policy serializes")
}

fn matrix_json(t: &Slt) -> Value {
    serde_json::to_value(t.to_doc()).expect("matrix serializes")
}

fn trace_json(t: &EtoTrace) -> Value {
    Value::Array(t.ops().iter().map(|op| Value::String(op.to_string())).collect())
}

fn invariants_json(t: &Slt) -> Value {
    let wall = t.wall_of_ref().map(|w| w.to_string()).ok();
    let measure = t.measure_sequence().map(|m| m.to_string()).ok();
    json!({ "wall": wall, "measure_sequence": measure })
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn cmd_reduce(cli: &Cli, path: &PathBuf) -> CmdResult {
    let t = read_matrix(path, cli.field)?;
    let (r, mut trace) = reduce_to_2ref(&t).map_err(usage)?;
    let (u, p_steps) = normalize_p_steps(&r).map_err(usage)?;
    let reduction_len = trace.len();
    trace.extend(&p_steps);
    match cli.format {
        Format::Json => print_json(&json!({
            "input": matrix_json(&t),
            "reduced": matrix_json(&r),
            "normalized": matrix_json(&u),
            "trace": trace_json(&trace),
            "reduction_steps": reduction_len,
            "invariants": invariants_json(&u),
            "policy": policy_json(),
        })),
        _ => {
            println!("# 2-REF");
            print!("{}", r.to_text());
            println!("# normalized");
            print!("{}", u.to_text());
            println!("trace {trace}");
            println!("wall {}", u.wall_of_ref().map_err(usage)?);
            if let Ok(m) = u.measure_sequence() {
                println!("measure {m}");
            }
        }
    }
    Ok(())
}

fn cmd_normalize(cli: &Cli, path: &PathBuf) -> CmdResult {
    let t = read_matrix(path, cli.field)?;
    let (u, trace) = normalize_p_steps(&t).map_err(usage)?;
    let class = if t.n() == 4 {
        let (form, _) = simplify_normalized(&u).map_err(usage)?;
        let c = canonical_rep(&t).map_err(usage)?;
        Some((form, c))
    } else {
        None
    };
    match cli.format {
        Format::Json => print_json(&json!({
            "normalized": matrix_json(&u),
            "trace": trace_json(&trace),
            "simplified": class.as_ref().map(|(f, _)| f.to_string()),
            "class": class.as_ref().map(|(_, c)| c.class.to_string()),
            "class_trace": class.as_ref().and_then(|(_, c)| c.trace.as_ref().map(trace_json)),
            "invariants": invariants_json(&u),
            "policy": policy_json(),
        })),
        _ => {
            print!("{}", u.to_text());
            println!("trace {trace}");
            if let Some((form, c)) = class {
                println!("simplified {form}");
                println!("class {}", c.class);
                match c.trace {
                    Some(tr) => println!("class trace {tr}"),
                    None => println!("class trace unavailable over {}", t.field()),
                }
            }
        }
    }
    Ok(())
}

fn cmd_iso(cli: &Cli, a: &PathBuf, b: &PathBuf) -> CmdResult {
    let t = read_matrix(a, cli.field)?;
    let s = read_matrix(b, cli.field)?;
    if t.n() != s.n() || t.field() != s.field() {
        return Err(usage("both matrices need the same size and field"));
    }
    let (rt, tt) = reduce_to_2ref(&t).map_err(usage)?;
    let (rs, ts) = reduce_to_2ref(&s).map_err(usage)?;
    let mut out = json!({
        "reduced_a": matrix_json(&rt),
        "trace_a": trace_json(&tt),
        "reduced_b": matrix_json(&rs),
        "trace_b": trace_json(&ts),
        "policy": policy_json(),
    });
    let verdict: (&str, String);
    if t.field().is_finite() {
        let cfg = IsoConfig {
            cap: cli.cap,
            ..IsoConfig::default()
        };
        match iso_search(&rt, &rs, &cfg) {
            Ok(IsoOutcome::Found(g)) => {
                out["gamma"] = Value::String(g.to_text());
                verdict = ("ISO", format!("gamma\n{}", g.to_text()));
            }
            Ok(IsoOutcome::Absent(why)) => {
                let reason = match why {
                    Absence::WallMismatch { t, s } => format!("walls differ: {t} vs {s}"),
                    Absence::MeasureMismatch { t, s } => format!("measure sequences differ: {t} vs {s}"),
                    Absence::Exhausted { candidates } => {
                        format!("search exhausted after {candidates} candidates")
                    }
                };
                out["reason"] = Value::String(reason.clone());
                verdict = ("NOT-ISO", reason);
            }
            Err(AlgebraError::Inconclusive { cap }) => {
                return Err(CliError::Inconclusive(format!("INCONCLUSIVE: cap {cap} reached")));
            }
            Err(e) => return Err(usage(e)),
        }
    } else if t.n() == 4 {
        let ct = canonical_rep(&rt).map_err(usage)?;
        let cs = canonical_rep(&rs).map_err(usage)?;
        out["class_a"] = Value::String(ct.class.to_string());
        out["class_b"] = Value::String(cs.class.to_string());
        verdict = if ct.class == cs.class {
            ("ISO", format!("both in class {}", ct.class))
        } else {
            ("NOT-ISO", format!("classes {} and {}", ct.class, cs.class))
        };
    } else {
        return Err(usage(format!("iso over {} is only available for n = 4", t.field())));
    }
    out["verdict"] = Value::String(verdict.0.into());
    match cli.format {
        Format::Json => print_json(&out),
        _ => {
            println!("a: trace {tt}");
            println!("b: trace {ts}");
            println!("{}", verdict.0);
            println!("{}", verdict.1.trim_end());
        }
    }
    Ok(())
}

fn cmd_orbit(cli: &Cli, path: &PathBuf) -> CmdResult {
    let t = read_matrix(path, cli.field)?;
    if !t.field().is_finite() {
        return Err(usage(format!("orbit needs a finite field, got {}", t.field())));
    }
    let members = orbit(&t).map_err(usage)?;
    let mut walls: BTreeMap<String, usize> = BTreeMap::new();
    let mut measures: BTreeMap<String, usize> = BTreeMap::new();
    for m in &members {
        if let Ok(w) = m.wall_of_ref() {
            *walls.entry(w.to_string()).or_default() += 1;
        }
        if let Ok(ms) = m.measure_sequence() {
            *measures.entry(ms.to_string()).or_default() += 1;
        }
    }
    let rep = members.iter().find(|m| m.is_2ref()).unwrap_or(&members[0]);
    let class = (t.n() == 4)
        .then(|| canonical_rep(&t).map(|c| c.class.to_string()))
        .transpose()
        .map_err(usage)?;
    match cli.format {
        Format::Json => print_json(&json!({
            "size": members.len(),
            "representative": matrix_json(rep),
            "class": class,
            "walls_of_1ref_members": walls,
            "measures_of_2ref_members": measures,
            "policy": policy_json(),
        })),
        _ => {
            println!("size {}", members.len());
            println!("# representative");
            print!("{}", rep.to_text());
            if let Some(c) = class {
                println!("class {c}");
            }
            for (w, k) in &walls {
                println!("wall {w}: {k} members in 1-REF");
            }
            for (m, k) in &measures {
                println!("measure {m}: {k} members in 2-REF");
            }
        }
    }
    Ok(())
}

fn cmd_count(cli: &Cli, qs: &[u64]) -> CmdResult {
    let mut reports = Vec::new();
    for &q in qs {
        reports.push(count_n4(q).map_err(usage)?);
    }
    match cli.format {
        Format::Json => {
            let v = serde_json::to_value(&reports).expect("report serializes");
            print_json(if reports.len() == 1 { &v[0] } else { &v });
        }
        Format::Csv => {
            println!("q,formula,constructive,orbits,agree");
            for r in &reports {
                println!("{},{},{},{},{}", r.q, r.n4_formula, r.n4_constructive, r.n4_orbits, r.agree);
            }
        }
        Format::Text => {
            for r in &reports {
                println!(
                    "q={} formula={} constructive={} orbits={} agree={}",
                    r.q, r.n4_formula, r.n4_constructive, r.n4_orbits, r.agree
                );
                let walls: Vec<String> = r.per_wall.iter().map(|(w, k)| format!("{w}:{k}")).collect();
                println!("  per wall {}", walls.join(" "));
                let cs: Vec<String> = r.c_classes.iter().map(|c| format!("{{{}}}", c.join(","))).collect();
                println!("  C classes {}", cs.join(" "));
            }
        }
    }
    if reports.iter().all(|r| r.agree) {
        Ok(())
    } else {
        Err(CliError::Failed("counts disagree".into()))
    }
}

fn cmd_reps(cli: &Cli) -> CmdResult {
    let field = cli.field.ok_or_else(|| usage("reps needs --field"))?;
    let reps = representatives_n4(field).map_err(usage)?;
    let region = reps.c_family == CFamily::RegionU;
    match cli.format {
        Format::Csv => print!("{}", reps.to_csv().map_err(usage)?),
        Format::Json => {
            let ms = reps.matrices().map_err(usage)?;
            let list: Vec<Value> = reps
                .forms
                .iter()
                .zip(&ms)
                .map(|(f, m)| json!({ "form": f.to_string(), "wall": f.wall().to_string(), "matrix": matrix_json(m) }))
                .collect();
            print_json(&json!({ "field": field.to_string(), "representatives": list, "c_region_u": region }));
        }
        Format::Text => {
            for f in &reps.forms {
                println!("{} {f}", f.wall());
            }
            if region {
                println!("(3,4) C(z) for every z in U");
            }
        }
    }
    Ok(())
}

fn cmd_complex(cli: &Cli, z: &str) -> CmdResult {
    let z = Field::GaussianRationals.parse_scalar(z).map_err(usage)?;
    let c = complex_canonical(&z);
    match cli.format {
        Format::Json => print_json(&json!({
            "z": z.to_string(),
            "canonical": c.to_string(),
            "z_in_u": in_region_u(&z),
        })),
        _ => println!("{c}"),
    }
    Ok(())
}

fn cmd_family(cli: &Cli, k: usize) -> CmdResult {
    let field = cli.field.unwrap_or(Field::Rationals);
    let fam = infinite_family(field, k).map_err(usage)?;
    let names: Vec<String> = fam.iter().map(ToString::to_string).collect();
    match cli.format {
        Format::Json => print_json(&json!({ "field": field.to_string(), "family": names })),
        Format::Csv => println!("{}", names.join(",")),
        Format::Text => {
            for a in names {
                println!("{a}");
            }
        }
    }
    Ok(())
}

fn cmd_verify(cli: &Cli, name: &str) -> CmdResult {
    println!("seed {}", cli.seed);
    let reports = suites::run(name, cli.seed).map_err(usage)?;
    let mut failed = 0;
    for r in &reports {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        failed += usize::from(!r.passed);
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{failed} suite(s) failed")))
    }
}

fn run(cli: &Cli) -> CmdResult {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(usage)?;
    }
    match &cli.command {
        Command::Reduce { matrix } => cmd_reduce(cli, matrix),
        Command::Normalize { matrix } => cmd_normalize(cli, matrix),
        Command::Iso { a, b } => cmd_iso(cli, a, b),
        Command::Orbit { matrix } => cmd_orbit(cli, matrix),
        Command::Count { q } => cmd_count(cli, q),
        Command::Reps => cmd_reps(cli),
        Command::ComplexCanon { z } => cmd_complex(cli, z),
        Command::InfiniteFamily { k } => cmd_family(cli, *k),
        Command::Verify { suite } => cmd_verify(cli, suite),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Usage(m) | CliError::Failed(m) | CliError::Inconclusive(m)) = &e;
            eprintln!("error: {m}");
            ExitCode::from(e.code())
        }
    }
}
