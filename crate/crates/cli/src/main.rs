use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use affine_bv::capacity::{self, BoundSource, CandidateFamily, CapacityBracket, DiscreteMeasure};
use affine_bv::cheeger::{self, CheegerConfig, DomainMesh};
use affine_bv::corpus;
use affine_bv::functionals::{inequality_report_with, PerimeterReport};
use affine_bv::geometry::shapes::regular_polygon;
use affine_bv::io::{fmt_sig, polytope_from_json, polytope_to_json, JsonError, PolytopeJson};
use affine_bv::sphere::Integrator;
use affine_bv::symmetrize::{iterate_symmetrization, verify_monotonicity};
use affine_bv::{Error, Polytope, Vector};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod verify;

/// Affine perimeter, affine BV-capacity, Steiner symmetrization and affine
/// Cheeger constants of polyhedral sets.
#[derive(Debug, Parser)]
#[command(name = "affine-bv", version)]
struct RunConfig {
    #[command(subcommand)]
    command: Command,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Gauss-Legendre order of the sphere quadrature in R^3.
    #[arg(long, global = true, default_value_t = 48)]
    order: usize,
    /// Override the tolerance of the asserted invariants.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for batch work.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Volume, perimeters, polar volume and isoperimetric ratios.
    Perimeter { input: PathBuf },
    /// Capacity of a compact set, exact or bracketed.
    Capacity {
        input: PathBuf,
        /// Require a convex body and return its exact capacity.
        #[arg(long, conflicts_with = "bracket")]
        convex: bool,
        /// Bracket the capacity of a general set (default).
        #[arg(long)]
        bracket: bool,
        /// Restrict the superset search to one candidate family.
        #[arg(long, value_parser = ["grid", "offset", "search"])]
        family: Option<String>,
    },
    /// Steiner symmetral along a direction, optionally iterated.
    Symmetrize {
        input: PathBuf,
        /// Comma-separated direction; random from the seed when absent.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        direction: Option<Vec<f64>>,
        /// Iterated symmetrizations to record in the trace.
        #[arg(long, default_value_t = 0)]
        steps: usize,
        /// CSV file for the iteration trace.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Affine q-Cheeger constant and affine Rayleigh quotient of a planar domain.
    Cheeger {
        domain: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
        #[arg(long = "mesh-h", default_value_t = 0.05)]
        mesh_h: f64,
        #[arg(long, default_value_t = 20)]
        iters: usize,
        /// CSV file for the descent trace.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run the inequality and property checks over a random corpus.
    Verify {
        #[arg(long, value_enum, default_value_t = CorpusKind::Random)]
        corpus: CorpusKind,
        /// Number of random convex polygons; the other families scale with it.
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Trace constants of a discrete measure over a family of convex bodies.
    Trace {
        /// JSON object with "points" and "masses".
        measure: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// JSON array of polytopes; centred disks of radii 2^-4..2^2 when absent.
        #[arg(long)]
        family: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Set,
    Function,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CorpusKind {
    Random,
}

/// Why a run did not exit cleanly.
#[derive(Debug)]
enum Failure {
    Invariant(String),
    Input(String),
    Divergent { message: String, object: String },
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invariant(_) | Failure::Other(_) => 1,
            Failure::Input(_) => 2,
            Failure::Divergent { .. } => 3,
        }
    }

    fn library(e: Error, object: &Polytope) -> Self {
        match e {
            Error::Divergent { .. } => Failure::Divergent { message: e.to_string(), object: polytope_to_json(object) },
            other => Failure::Other(other.to_string()),
        }
    }
}

/// Report text plus whether every asserted invariant held.
struct Outcome {
    report: String,
    ok: Result<(), String>,
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    if let Some(n) = config.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Invariant(m) => eprintln!("invariant failed: {m}"),
                Failure::Input(m) => eprintln!("malformed input: {m}"),
                Failure::Divergent { message, object } => eprintln!("divergence: {message}\n{object}"),
                Failure::Other(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(config: &RunConfig) -> Result<(), Failure> {
    let integrator = Integrator::new(config.order);
    let outcome = match &config.command {
        Command::Perimeter { input } => perimeter(config, &integrator, input)?,
        Command::Capacity { input, convex, family, .. } => capacity_cmd(config, &integrator, input, *convex, family.as_deref())?,
        Command::Symmetrize { input, direction, steps, trace } => {
            symmetrize(config, &integrator, input, direction.as_deref(), *steps, trace.as_deref())?
        }
        Command::Cheeger { domain, q, p, mode, mesh_h, iters, trace } => {
            cheeger_cmd(config, domain, *q, *p, *mode, *mesh_h, *iters, trace.as_deref())?
        }
        Command::Verify { count, .. } => verify::run(config.seed, *count, &integrator, config.tol)?,
        Command::Trace { measure, q, family } => trace_cmd(config, &integrator, measure, *q, family.as_deref())?,
    };
    emit(config.output.as_deref(), &outcome.report)?;
    outcome.ok.map_err(Failure::Invariant)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Other(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Polytope, Failure> {
    polytope_from_json(&read(path)?).map_err(|e| match e {
        JsonError::Syntax { line, column, message } => {
            Failure::Input(format!("{}: line {line}, column {column}: {message}", path.display()))
        }
        JsonError::Content(e) => Failure::Input(format!("{}: {e}", path.display())),
    })
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialise");
    s.push('\n');
    s
}

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn perimeter(config: &RunConfig, integrator: &Integrator, input: &Path) -> Result<Outcome, Failure> {
    let e = load(input)?;
    let r = inequality_report_with(&e, integrator).map_err(|err| Failure::library(err, &e))?;
    if !r.polar_volume.is_finite() {
        return Err(Failure::Divergent {
            message: "facet normals do not span the space; the polar projection body is unbounded".into(),
            object: polytope_to_json(&e),
        });
    }
    let petty_tol = config.tol.unwrap_or(if r.dimension == 2 { 1e-6 } else { 2e-3 });
    let report = match config.format.unwrap_or(Format::Csv) {
        Format::Csv => format!("{}\n{}\n", PerimeterReport::CSV_HEADER, r.csv_row()),
        Format::Json => json(&r),
    };
    let ok = check(r.petty_ratio <= 1.0 + petty_tol, || format!("petty_ratio {} above 1 + {petty_tol}", fmt_sig(r.petty_ratio)))
        .and(check(r.slack_e12p >= -1e-9 * r.perimeter, || format!("slack_e12P {} negative", fmt_sig(r.slack_e12p))));
    Ok(Outcome { report, ok })
}

fn capacity_cmd(
    config: &RunConfig,
    integrator: &Integrator,
    input: &Path,
    convex: bool,
    family: Option<&str>,
) -> Result<Outcome, Failure> {
    let k = load(input)?;
    let bracket = if convex {
        let c = capacity::capacity_convex_with(&k, integrator).map_err(|e| Failure::library(e, &k))?;
        CapacityBracket {
            lower: c,
            upper: c,
            exact: true,
            lower_source: BoundSource::Exact,
            upper_source: BoundSource::Exact,
            lower_witness: Some(k.clone()),
            upper_witness: Some(k.clone()),
        }
    } else {
        let family = match family {
            Some(name) => CandidateFamily::only(name).map_err(|e| Failure::Other(e.to_string()))?,
            None => CandidateFamily::default(),
        };
        capacity::capacity_bracket_with(&k, &family, integrator).map_err(|e| Failure::library(e, &k))?
    };
    let tol = config.tol.unwrap_or(1e-9) * bracket.upper.abs().max(1.0);
    let ok = check(bracket.lower <= bracket.upper + tol, || {
        format!("lower bound {} exceeds upper bound {}", fmt_sig(bracket.lower), fmt_sig(bracket.upper))
    });
    Ok(Outcome { report: json(&bracket), ok })
}

/// Directions at golden-angle increments, so no two steps repeat.
fn golden_directions(count: usize) -> Vec<Vector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count).map(|k| Vector::from_vec(vec![(k as f64 * golden).cos(), (k as f64 * golden).sin()])).collect()
}

fn symmetrize(
    config: &RunConfig,
    integrator: &Integrator,
    input: &Path,
    direction: Option<&[f64]>,
    steps: usize,
    trace: Option<&Path>,
) -> Result<Outcome, Failure> {
    let e = load(input)?;
    let n = e.dim();
    let mut rng = corpus::rng(config.seed);
    let u = match direction {
        Some(d) if d.len() == n => Vector::from_vec(d.to_vec()),
        Some(d) => return Err(Failure::Input(format!("direction has {} components, the set lives in R^{n}", d.len()))),
        None => corpus::random_direction(&mut rng, n),
    };
    let tol = config.tol.unwrap_or(1e-9);
    let report = verify_monotonicity(&e, &u, integrator, tol).map_err(|err| Failure::library(err, &e))?;
    let mut ok = check(report.pass(), || {
        format!("monotonicity failed for {}", report.counterexample.clone().unwrap_or_default())
    });
    if steps > 0 {
        let directions: Vec<Vector> =
            if n == 2 { golden_directions(steps) } else { (0..steps).map(|_| corpus::random_direction(&mut rng, n)).collect() };
        let t = iterate_symmetrization(&e, &directions, steps, integrator, tol).map_err(|err| Failure::library(err, &e))?;
        ok = ok.and(check(t.monotone, || "affine perimeter grew during iteration".into()));
        match trace {
            Some(path) => emit(Some(path), &t.to_csv())?,
            None => eprint!("{}", t.to_csv()),
        }
    }
    Ok(Outcome { report: json(&report.result), ok })
}

#[derive(Serialize)]
struct CheegerReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    set: Option<cheeger::CheegerResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    function: Option<cheeger::RayleighResult>,
}

#[allow(clippy::too_many_arguments)]
fn cheeger_cmd(
    config: &RunConfig,
    domain: &Path,
    q: f64,
    p: f64,
    mode: Mode,
    mesh_h: f64,
    iters: usize,
    trace: Option<&Path>,
) -> Result<Outcome, Failure> {
    let o = load(domain)?;
    let set = match mode {
        Mode::Set | Mode::Both => {
            Some(cheeger::affine_cheeger(&o, q, &CheegerConfig::default(), config.seed).map_err(|e| Failure::library(e, &o))?)
        }
        Mode::Function => None,
    };
    let function = match mode {
        Mode::Function | Mode::Both => {
            let mesh = DomainMesh::new(&o, mesh_h).map_err(|e| Failure::library(e, &o))?;
            Some(cheeger::minimize_rayleigh(&mesh, p, q, iters, config.seed).map_err(|e| Failure::library(e, &o))?)
        }
        Mode::Set => None,
    };
    let tol = config.tol.unwrap_or(1e-6);
    let mut ok = Ok(());
    if let Some(s) = &set {
        ok = ok.and(check(s.comparison_ok, || "affine quotient above (2/pi) times the classical quotient".into()));
    }
    if let (Some(s), Some(f)) = (&set, &function) {
        ok = ok.and(check(f.value >= s.value - tol, || {
            format!("Rayleigh quotient {} below the set value {}", fmt_sig(f.value), fmt_sig(s.value))
        }));
    }
    if let Some(path) = trace {
        let empty = Vec::new();
        let (a, b) = (set.as_ref().map_or(&empty, |s| &s.trace), function.as_ref().map_or(&empty, |f| &f.trace));
        let cell = |v: Option<&f64>| v.map(|x| fmt_sig(*x)).unwrap_or_default();
        let mut csv = String::from("iteration,set,function\n");
        for i in 0..a.len().max(b.len()) {
            csv.push_str(&format!("{i},{},{}\n", cell(a.get(i)), cell(b.get(i))));
        }
        emit(Some(path), &csv)?;
    }
    Ok(Outcome { report: json(&CheegerReport { set, function }), ok })
}

#[derive(serde::Deserialize)]
struct MeasureJson {
    points: Vec<Vec<f64>>,
    masses: Vec<f64>,
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| {
        Failure::Input(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })
}

fn trace_cmd(
    config: &RunConfig,
    integrator: &Integrator,
    measure: &Path,
    q: f64,
    family: Option<&Path>,
) -> Result<Outcome, Failure> {
    let m: MeasureJson = parse(measure)?;
    let points: Vec<Vector> = m.points.into_iter().map(Vector::from_vec).collect();
    let mu = DiscreteMeasure::new(points, m.masses).map_err(|e| Failure::Input(format!("{}: {e}", measure.display())))?;
    let family: Vec<Polytope> = match family {
        Some(path) => {
            let list: Vec<PolytopeJson> = parse(path)?;
            list.iter()
                .map(|p| p.to_polytope().map_err(|e| Failure::Input(format!("{}: {e}", path.display()))))
                .collect::<Result<_, _>>()?
        }
        None => (-4..=2)
            .map(|k| regular_polygon(256, 2f64.powi(k), [0.0, 0.0]).map_err(|e| Failure::Other(e.to_string())))
            .collect::<Result<_, _>>()?,
    };
    let t = capacity::trace_constants(&mu, q, &family, integrator).map_err(|e| match e {
        Error::Config(_) | Error::Domain(_) => Failure::Input(e.to_string()),
        other => Failure::Other(other.to_string()),
    })?;
    let tol = config.tol.unwrap_or(1e-12);
    let ok = check(t.kappa2_hat >= t.kappa3_hat - tol, || "kappa2 below kappa3".into());
    Ok(Outcome { report: json(&t), ok })
}
