use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use weavecurv::certify::{check_max_rank_points, check_max_rank_symbolic, CurvatureReport, Verdict};
use weavecurv::connection::{build_connection, compare_nesting};
use weavecurv::flat::{formal_flat_section, unit_initial};
use weavecurv::linalg::Matrix;
use weavecurv::prolong::{build_system, rank_bound_table};
use weavecurv::scalar::{Fp, Symbolic};
use weavecurv::web::{builtin_w0_file, WebFile, WebSpec};
use weavecurv::{DiffScalar, Error};

/// Primes offered for the point backend; the first is the default.
const PRIMES: [u64; 4] = [2_305_843_009_213_693_951, 4_611_686_018_427_387_847, 576_460_752_303_423_433, 2_199_023_255_531];

#[derive(Parser)]
#[command(name = "weavecurv", version, about = "Curvature criterion for maximal rank of webs of curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Debug)]
enum BackendKind {
    Symbolic,
    Point,
}

#[derive(clap::Args)]
struct CurvatureArgs {
    #[arg(long)]
    web: PathBuf,
    #[arg(long, value_enum, default_value = "symbolic")]
    backend: BackendKind,
    #[arg(long, default_value_t = 5)]
    samples: usize,
    #[arg(long, default_value_t = PRIMES[0])]
    prime: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated 1-based field indices to keep.
    #[arg(long, value_delimiter = ',')]
    subset: Option<Vec<usize>>,
}

#[derive(Subcommand)]
enum Command {
    /// Ranks of R_h and the bound on the rank of a d-web in n dimensions.
    RankBound {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        d: usize,
    },
    /// Prints a builtin web as a bare web file, ready for `--web`.
    Builtin {
        name: String,
        #[arg(short)]
        n: usize,
        #[arg(long)]
        deform: Option<String>,
    },
    /// Shapes and ranks of M_h, P_h, Q_h.
    Matrices {
        #[arg(long)]
        web: PathBuf,
        #[arg(long)]
        order: usize,
        /// Include rendered entries.
        #[arg(long)]
        entries: bool,
    },
    /// Pivots, kernel basis and connection matrices.
    Connection {
        #[arg(long)]
        web: PathBuf,
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
    },
    /// Curvature matrices and the maximal-rank verdict.
    Curvature(CurvatureArgs),
    /// Same pipeline as `curvature`, printing only the verdict.
    CheckMaxRank(CurvatureArgs),
    /// Formal abelian relation grown from initial pivot data at a point.
    FlatSection {
        #[arg(long)]
        web: PathBuf,
        /// Comma-separated rationals, coordinates then parameters.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<String>,
        /// `eJ` for the J-th unit vector, or comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        init: String,
        #[arg(long)]
        order: usize,
    },
    /// Restricts a web to some of its fields and compares connections.
    Subweb {
        #[arg(long)]
        web: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<usize>,
    },
}

enum Failure {
    NotFlat(Value),
    Error(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e.to_string())
    }
}

fn load(path: &Path) -> Result<WebSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))?;
    let file: WebFile = serde_json::from_str(&text).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))?;
    Ok(WebSpec::from_file(&file)?)
}

fn load_subset(path: &Path, subset: &Option<Vec<usize>>) -> Result<WebSpec, Failure> {
    let w = load(path)?;
    Ok(match subset {
        Some(keep) => w.subweb(keep)?,
        None => w,
    })
}

fn rational(s: &str) -> Result<BigRational, Failure> {
    s.trim().parse().map_err(|_| Failure::Error(format!("not a rational number: `{s}`")))
}

fn matrix_summary<E: DiffScalar>(name: &str, m: &Matrix<E>, entries: bool) -> Value {
    let mut v = json!({ "name": name, "rows": m.rows(), "cols": m.cols(), "rank": m.rank() });
    if entries {
        v["entries"] = json!(m.render());
    }
    v
}

fn curvature(args: &CurvatureArgs) -> Result<CurvatureReport, Failure> {
    let w = load_subset(&args.web, &args.subset)?;
    Ok(match args.backend {
        BackendKind::Symbolic => check_max_rank_symbolic(&w)?,
        BackendKind::Point => {
            let p = Some(args.prime);
            match args.prime {
                x if x == PRIMES[0] => check_max_rank_points::<Fp<{ PRIMES[0] }>>(&w, args.samples, args.seed, p)?,
                x if x == PRIMES[1] => check_max_rank_points::<Fp<{ PRIMES[1] }>>(&w, args.samples, args.seed, p)?,
                x if x == PRIMES[2] => check_max_rank_points::<Fp<{ PRIMES[2] }>>(&w, args.samples, args.seed, p)?,
                x if x == PRIMES[3] => check_max_rank_points::<Fp<{ PRIMES[3] }>>(&w, args.samples, args.seed, p)?,
                other => {
                    return Err(Failure::Error(format!(
                        "unsupported prime {other}; choose one of {}",
                        PRIMES.map(|p| p.to_string()).join(", ")
                    )))
                }
            }
        }
    })
}

fn verdict_payload(r: &CurvatureReport) -> Value {
    json!({ "verdict": r.verdict, "ro": r.ro, "witnesses": r.witnesses, "samples": r.samples })
}

fn run(command: &Command) -> Result<Value, Failure> {
    match command {
        Command::RankBound { n, d } => Ok(json!(rank_bound_table(*n, *d)?)),
        Command::Builtin { name, n, deform } => {
            if name != "w0" {
                return Err(Failure::Error(format!("unknown builtin `{name}` (available: w0)")));
            }
            Ok(json!(builtin_w0_file(*n, deform.as_deref())?))
        }
        Command::Matrices { web, order, entries } => {
            let w = load(web)?;
            if *order == 0 {
                return Err(Failure::Error("order must be at least 1".into()));
            }
            let sys = build_system(&w, &Symbolic, *order)?;
            Ok(json!({
                "n": w.n(),
                "d": w.d(),
                "order": order,
                "matrices": [
                    matrix_summary(&format!("M{order}"), &sys.m(*order), *entries),
                    matrix_summary(&format!("P{order}"), &sys.p(*order), *entries),
                    matrix_summary(&format!("Q{order}"), &sys.q(*order), *entries),
                ],
            }))
        }
        Command::Connection { web, subset } => {
            let w = load_subset(web, subset)?;
            let cd = build_connection(&w, &Symbolic)?;
            Ok(json!({
                "n": w.n(),
                "d": w.d(),
                "ro": cd.ro(),
                "pivots": cd.pivots(),
                "n2": matrix_summary("N2", cd.n2(), false),
                "connection": (0..w.n()).map(|k| json!({ "k": k + 1, "entries": cd.a(k).render() })).collect::<Vec<_>>(),
            }))
        }
        Command::Curvature(args) => {
            let r = curvature(args)?;
            let payload = serde_json::to_value(&r).expect("serializable");
            match r.verdict {
                Verdict::NotFlat => Err(Failure::NotFlat(payload)),
                _ => Ok(payload),
            }
        }
        Command::CheckMaxRank(args) => {
            let r = curvature(args)?;
            let payload = verdict_payload(&r);
            match r.verdict {
                Verdict::NotFlat => Err(Failure::NotFlat(payload)),
                _ => Ok(payload),
            }
        }
        Command::FlatSection { web, point, init, order } => {
            let w = load(web)?;
            let point = point.iter().map(|s| rational(s)).collect::<Result<Vec<_>, _>>()?;
            let ro = weavecurv::multiindex::rank_bound(w.n(), w.d());
            let initial = match init.strip_prefix('e') {
                Some(j) => {
                    let j: usize = j.parse().map_err(|_| Failure::Error(format!("bad unit vector `{init}`")))?;
                    if j == 0 || j > ro {
                        return Err(Failure::Error(format!("unit vector index must lie in 1..={ro}")));
                    }
                    unit_initial(ro, j - 1)
                }
                None => init.split(',').map(rational).collect::<Result<_, _>>()?,
            };
            let series = formal_flat_section(&w, &point, &initial, *order)?;
            let check = series.check(&w)?;
            Ok(json!({
                "point": point.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                "order": order,
                "terms": series.terms(),
                "relation_check": { "valid_to_order": order.saturating_sub(1), "violated": check.violated },
            }))
        }
        Command::Subweb { web, keep } => {
            let w = load(web)?;
            let sub = w.subweb(keep)?;
            let full = build_connection(&w, &Symbolic)?;
            let part = build_connection(&sub, &Symbolic)?;
            let nesting = compare_nesting(&full, &part)?;
            let payload = json!({
                "web": sub.to_file(),
                "ro": nesting.ro,
                "sub_ro": nesting.sub_ro,
                "leading_block_matches": nesting.leading_block_matches,
                "lower_left_zero": nesting.lower_left_zero,
            });
            if nesting.holds() {
                Ok(payload)
            } else {
                Err(Failure::NotFlat(payload))
            }
        }
    }
}

#[derive(Serialize)]
struct ReportFile {
    command: Vec<String>,
    version: &'static str,
    seed: Option<u64>,
    backend: Option<String>,
    timings_ms: u128,
    payload: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("WEAVECURV_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    let (seed, backend) = match &cli.command {
        Command::Curvature(a) | Command::CheckMaxRank(a) => (
            (a.backend == BackendKind::Point).then_some(a.seed),
            Some(format!("{:?}", a.backend).to_lowercase()),
        ),
        _ => (None, None),
    };
    let start = Instant::now();
    let outcome = run(&cli.command);
    let (payload, code) = match outcome {
        Ok(p) => (p, 0),
        Err(Failure::NotFlat(p)) => (p, 1),
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if matches!(cli.command, Command::Builtin { .. }) {
        emit(&payload);
        return ExitCode::from(code);
    }
    let report = ReportFile {
        command: std::env::args().collect(),
        version: env!("CARGO_PKG_VERSION"),
        seed,
        backend,
        timings_ms: start.elapsed().as_millis(),
        payload,
    };
    emit(&report);
    ExitCode::from(code)
}

fn emit<T: Serialize>(value: &T) {
    use std::io::Write;
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(value).expect("serializable"));
}
