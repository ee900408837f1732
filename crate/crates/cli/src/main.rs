//! `qpmut`: generate, mutate and enumerate quivers with potentials.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qpmut::explorer::{self, class_report, enumerate_class, EnumerateConfig, InvariantKind};
use qpmut::generators::{build_disc_fan, build_pqr, build_surface_qp, build_x6, StarParams, SurfaceParams};
use qpmut::potential::{mutate_qp_traced, qp_key};
use qpmut::verify::{Suite, Verifier, CRITERIA, SURFACE_TABLE};
use qpmut::{gentle, jacobian, Error, KeyMode, QP};

#[derive(Parser)]
#[command(name = "qpmut", version, about = "Mutation classes of quivers with potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a QP from one of the built-in families.
    Gen(GenArgs),
    /// Mutate a QP at one vertex.
    Mutate(MutateArgs),
    /// Enumerate the mutation class of a QP.
    Enumerate(EnumerateArgs),
    /// Derived invariants of a single QP.
    Invariants(InvariantArgs),
    /// The four class conditions for the mutation class of a QP.
    Delta(EnumerateArgs),
    /// Recompute the published counts and invariants.
    VerifyPaper(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Surface,
    Pqr,
    X6,
    Disc,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Genus (surface family).
    #[arg(long)]
    g: Option<usize>,
    /// Number of boundary components (surface family).
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    /// Marked points on the disc.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MutateArgs {
    /// QP JSON file, or `-` for stdin.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    at: usize,
    /// Also print the premutated QP and the reduction steps.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KeyArg {
    Quiver,
    Structural,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// Gentle invariants when the QP is gentle, else Jacobian ones.
    Auto,
    Gentle,
    Jacobian,
    None,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "quiver")]
    key_mode: KeyArg,
    #[arg(long, default_value_t = 10_000)]
    node_cap: usize,
    /// Stop after this many mutation steps from the seed.
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    invariants: KindArg,
    #[arg(long)]
    threads: Option<usize>,
    /// Write the mutation graph in DOT format.
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InvariantArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    kind: KindArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// `surface`, `exceptional`, `properties`, or comma-separated criterion numbers.
    #[arg(long)]
    only: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    /// Write the results as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for DOT files of the surface mutation graphs.
    #[arg(long)]
    dot: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Computation(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::Parse(_) => Failure::Usage(e.to_string()),
            other => Failure::Computation(other.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Mutate(a) => mutate(a),
        Command::Enumerate(a) => enumerate(a, false),
        Command::Delta(a) => enumerate(a, true),
        Command::Invariants(a) => invariants(a),
        Command::VerifyPaper(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Computation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Verification) => ExitCode::from(3),
    }
}

fn read_qp(path: &Path) -> Result<QP, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    };
    Ok(QP::from_json_str(&text)?)
}

fn write_text(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Computation(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| Failure::Computation(e.to_string()))
        }
    }
}

fn emit(out: Option<&Path>, value: &Value) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Computation(e.to_string()))?;
    write_text(out, &text)
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(|e| Failure::Computation(e.to_string()))
}

fn need(name: &str, v: Option<usize>) -> Result<usize, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this family")))
}

fn gen(a: GenArgs) -> CliResult {
    let qp = match a.family {
        Family::Surface => build_surface_qp(SurfaceParams::new(need("g", a.g)?, need("b", a.b)?)?)?,
        Family::Pqr => build_pqr(StarParams::new(need("p", a.p)?, need("q", a.q)?, need("r", a.r)?)?)?,
        Family::X6 => build_x6(),
        Family::Disc => build_disc_fan(need("points", a.points)?)?,
    };
    write_text(a.out.as_deref(), &qp.to_json_string())
}

fn mutate(a: MutateArgs) -> CliResult {
    let qp = read_qp(&a.input)?;
    if a.at >= qp.n() {
        return Err(Failure::Usage(format!("--at {} is not a vertex of a {}-vertex quiver", a.at, qp.n())));
    }
    let (pre, out, trace) = mutate_qp_traced(&qp, a.at)?;
    if a.trace {
        let value = json!({
            "premutated": to_value(&pre.to_json())?,
            "substitutions": to_value(&trace)?,
            "result": to_value(&out.to_json())?,
        });
        emit(a.out.as_deref(), &value)
    } else {
        write_text(a.out.as_deref(), &out.to_json_string())
    }
}

fn resolve_kind(kind: KindArg, qp: &QP) -> Option<InvariantKind> {
    match kind {
        KindArg::Auto if explorer::is_surface_like(qp) => Some(InvariantKind::Gentle),
        KindArg::Auto | KindArg::Jacobian => Some(InvariantKind::Jacobian),
        KindArg::Gentle => Some(InvariantKind::Gentle),
        KindArg::None => None,
    }
}

fn enumerate(a: EnumerateArgs, verdicts_only: bool) -> CliResult {
    if a.threads == Some(0) {
        return Err(Failure::Usage("--threads must be positive".into()));
    }
    let seed = read_qp(&a.input)?;
    let cfg = EnumerateConfig {
        key_mode: match a.key_mode {
            KeyArg::Quiver => KeyMode::Quiver,
            KeyArg::Structural => KeyMode::Structural,
        },
        node_cap: a.node_cap,
        max_depth: a.max_depth,
        threads: a.threads,
    };
    let mut class = enumerate_class(&seed, &cfg)?;
    let kind = match (verdicts_only, resolve_kind(a.invariants, &seed)) {
        (true, None) => resolve_kind(KindArg::Auto, &seed),
        (_, k) => k,
    };
    if let Some(kind) = kind {
        class.compute_invariants(kind, a.threads)?;
    }
    if let Some(path) = &a.dot {
        fs::write(path, class.to_dot()).map_err(|e| Failure::Computation(format!("{}: {e}", path.display())))?;
    }
    let report = class_report(&class);
    let value = if verdicts_only {
        json!({ "stats": to_value(&report.stats)?, "verdicts": to_value(&report.verdicts)? })
    } else {
        to_value(&report)?
    };
    emit(a.out.as_deref(), &value)
}

fn invariants(a: InvariantArgs) -> CliResult {
    let qp = read_qp(&a.input)?;
    let mut value = json!({
        "n": qp.n(),
        "e": qp.arrow_count(),
        "t": qp.triangle_count(),
        "quiver_key": format!("{:016x}", explorer::key_hash(&qp_key(&qp, KeyMode::Quiver).bytes)),
        "structural_key": format!("{:016x}", explorer::key_hash(&qp_key(&qp, KeyMode::Structural).bytes)),
    });
    let map = value.as_object_mut().expect("object literal");
    match resolve_kind(a.kind, &qp) {
        Some(InvariantKind::Gentle) => {
            let r = gentle::gentle_report(&qp)?;
            map.insert("aag_text".into(), Value::String(explorer::render_aag(&r.aag)));
            map.insert("gentle".into(), to_value(&r)?);
        }
        Some(InvariantKind::Jacobian) => {
            let r = jacobian::jacobian_report(&qp)?;
            map.insert(
                "coxeter_text".into(),
                Value::String(jacobian::format_polynomial(&r.coxeter)),
            );
            map.insert("jacobian".into(), to_value(&r)?);
        }
        None => {}
    }
    emit(a.out.as_deref(), &value)
}

fn parse_only(only: Option<&str>) -> Result<Vec<usize>, Failure> {
    let all: Vec<usize> = CRITERIA.iter().map(|c| c.0).collect();
    let Some(selection) = only else {
        return Ok(all);
    };
    let suite = |s: Suite| CRITERIA.iter().filter(|c| c.2 == s).map(|c| c.0).collect();
    match selection {
        "surface" => Ok(suite(Suite::Surface)),
        "exceptional" => Ok(suite(Suite::Exceptional)),
        "properties" => Ok(suite(Suite::Properties)),
        list => {
            let mut ids = Vec::new();
            for part in list.split(',') {
                let id: usize = part
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("--only: unknown selection `{part}`")))?;
                if !all.contains(&id) {
                    return Err(Failure::Usage(format!("--only: no criterion {id}")));
                }
                if !ids.contains(&id) {
                    ids.push(id);
                }
            }
            Ok(ids)
        }
    }
}

fn verify(a: VerifyArgs) -> CliResult {
    if a.threads == Some(0) {
        return Err(Failure::Usage("--threads must be positive".into()));
    }
    let ids = parse_only(a.only.as_deref())?;
    let verifier = Verifier::new(a.threads);
    let mut results = Vec::new();
    for id in ids {
        let r = verifier.run(id);
        println!("[{}] {:>2} {}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.title);
        for line in &r.details {
            println!("        {line}");
        }
        results.push(r);
    }
    if let Some(dir) = &a.dot {
        let classes = verifier.surface_classes().map_err(Failure::Computation)?;
        fs::create_dir_all(dir).map_err(|e| Failure::Computation(format!("{}: {e}", dir.display())))?;
        for (s, &(g, b, _)) in classes.iter().zip(SURFACE_TABLE.iter()) {
            let path = dir.join(format!("surface_{g}_{b}.dot"));
            fs::write(&path, s.class.to_dot()).map_err(|e| Failure::Computation(format!("{}: {e}", path.display())))?;
        }
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed} of {} checks passed", results.len());
    if let Some(path) = &a.out {
        let text = serde_json::to_string_pretty(&results).map_err(|e| Failure::Computation(e.to_string()))?;
        fs::write(path, text).map_err(|e| Failure::Computation(format!("{}: {e}", path.display())))?;
    }
    if passed == results.len() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
