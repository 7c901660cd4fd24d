//! `agtool`: generate sample structures, analyze them, print determinant
//! guards and run the property suites.
//!
//! Exit codes: 0 success, 1 runtime failure or failed verification, 2 usage
//! or parse error, 3 constraint violation in the input.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use almost_grassmann::analysis::{analyze_field, analyze_raw, Tolerances};
use almost_grassmann::coframe::{CoframeField, FieldFile, GridSpec, Layout};
use almost_grassmann::curvature::determinant_guards;
use almost_grassmann::error::Error;
use almost_grassmann::geometry::{
    flat_coframe, perturbed_coframe, web_coframe, web_coframe_from_file, ChartFactors, FoliationFile, ThreeWeb,
};
use almost_grassmann::tensor::{IndexedTensor, Signature, TensorFile};
use almost_grassmann::torsion::RawCoefficients;
use almost_grassmann::verify::{run_suite, Suite};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use report::{AnalysisReport, GuardReport, InputHash, InputKind, Provenance};

#[derive(Parser)]
#[command(name = "agtool", version, about = "Structure tensors and integrability tests for almost Grassmann structures")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Size of the first factor.
    #[arg(long, global = true)]
    p: Option<usize>,
    /// Size of the second factor.
    #[arg(long, global = true)]
    q: Option<usize>,
    /// Tolerance for algebraic identities, relative to the input scale.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol_constraint: f64,
    /// Tolerance for vanishing tests on computed objects.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_pipeline: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Pretty-print JSON and write a human-readable table to standard error.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write a coframe field or a raw coefficient tensor.
    Generate(GenerateArgs),
    /// Run the analysis pipeline on a field or raw coefficient file.
    Analyze {
        input: PathBuf,
    },
    /// Print the determinant guards of the curvature systems.
    Guards,
    /// Run a seeded property suite.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 100)]
        reps: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Flat,
    Web,
    Perturbed,
    RandomU,
}

#[derive(Clone, Copy, ValueEnum)]
enum FactorsArg {
    Identity,
    Affine,
    Analytic,
}

#[derive(Clone, Copy, ValueEnum)]
enum WebArg {
    Parallel,
    Polynomial,
    Transcendental,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Star,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Core,
    Geometry,
    Pipeline,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// Grid nodes per axis (odd).
    #[arg(long, default_value_t = 9)]
    nodes: usize,
    #[arg(long, default_value_t = -0.3, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long, value_enum, default_value_t = LayoutArg::Star)]
    layout: LayoutArg,
    /// L1 radius of the star layout around the grid center.
    #[arg(long, default_value_t = 3)]
    radius: usize,
    /// Chart factors of a flat field.
    #[arg(long, value_enum, default_value_t = FactorsArg::Identity)]
    factors: FactorsArg,
    #[arg(long, default_value_t = 0.3)]
    amplitude: f64,
    /// Perturbation size (default 0.2) or web deformation (default 0.5).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = WebArg::Polynomial)]
    web: WebArg,
    /// Foliation normals for webs with p > 2.
    #[arg(long)]
    foliations: Option<PathBuf>,
    /// Write frames to a little-endian f64 side file next to the header.
    #[arg(long)]
    binary: bool,
}

enum Failure {
    Usage(String),
    Failed(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Failed(_) => 1,
            Failure::Core(e) if e.is_constraint_violation() => 3,
            Failure::Core(Error::Parse(_) | Error::Json(_) | Error::Io(_)) => 2,
            Failure::Core(
                Error::InvalidSignature { .. } | Error::InvalidGrid(_) | Error::GridTooCoarse(_) | Error::SpecMismatch(_),
            ) => 2,
            Failure::Core(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Failed(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

fn signature(g: &Global) -> Outcome<Signature> {
    match (g.p, g.q) {
        (Some(p), Some(q)) => Ok(Signature::new(p, q)?),
        _ => usage("--p and --q are required"),
    }
}

fn tolerances(g: &Global) -> Outcome<Tolerances> {
    for (name, v) in [("--tol-constraint", g.tol_constraint), ("--tol-pipeline", g.tol_pipeline)] {
        if !(v.is_finite() && v > 0.0) {
            return usage(format!("{name} must be positive, got {v}"));
        }
    }
    Ok(Tolerances {
        constraint: g.tol_constraint,
        pipeline: g.tol_pipeline,
    })
}

fn to_json<T: Serialize>(value: &T, pretty: bool) -> Outcome<String> {
    let mut s = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn emit(g: &Global, text: &str) -> Outcome<()> {
    match &g.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Failed(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn generate(g: &Global, a: &GenerateArgs) -> Outcome<()> {
    if let Kind::RandomU = a.kind {
        let s = signature(g)?;
        let u = RawCoefficients::random(s, &mut ChaCha8Rng::seed_from_u64(g.seed));
        return emit(g, &to_json(&TensorFile::from(u.tensor()), g.pretty)?);
    }
    if a.binary && g.out.is_none() {
        return usage("--binary needs --out");
    }
    let foliations = match (&a.foliations, a.kind) {
        (Some(path), Kind::Web) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let file: FoliationFile = serde_json::from_str(&text).map_err(Error::from)?;
            let s = file.validate()?;
            if g.p.is_some_and(|p| p != s.p()) || g.q.is_some_and(|q| q != s.q()) {
                return usage("--p/--q disagree with the foliation file");
            }
            Some(file)
        }
        (Some(_), _) => return usage("--foliations only applies to web"),
        (None, _) => None,
    };
    if matches!(a.kind, Kind::Web) && foliations.is_none() && g.p.is_some_and(|p| p != 2) {
        return usage(format!("web with p = {} needs --foliations; built-in webs have p = 2", g.p.unwrap_or(0)));
    }
    let s = match &foliations {
        Some(f) => Signature::new(f.p, f.q)?,
        None => signature(g)?,
    };
    let grid = GridSpec::cube(s.n(), a.lo, a.hi, a.nodes);
    grid.validate(s.n())?;
    let layout = match a.layout {
        LayoutArg::Star => Layout::star(&grid, a.radius)?,
        LayoutArg::Full => Layout::Full,
    };
    let field = match a.kind {
        Kind::Flat => {
            let factors = match a.factors {
                FactorsArg::Identity => ChartFactors::Identity,
                FactorsArg::Affine => ChartFactors::Affine { amplitude: a.amplitude },
                FactorsArg::Analytic => ChartFactors::Analytic { amplitude: a.amplitude },
            };
            flat_coframe(s, &grid, &layout, factors)?
        }
        Kind::Perturbed => perturbed_coframe(s, &grid, &layout, a.epsilon.unwrap_or(0.2))?,
        Kind::Web => match &foliations {
            Some(f) => web_coframe_from_file(f, &grid, &layout)?,
            None => {
                let epsilon = a.epsilon.unwrap_or(0.5);
                let web = match a.web {
                    WebArg::Parallel => ThreeWeb::Parallel,
                    WebArg::Polynomial => ThreeWeb::Polynomial { epsilon },
                    WebArg::Transcendental => ThreeWeb::Transcendental { epsilon },
                };
                web_coframe(s, web, &grid, &layout)?
            }
        },
        Kind::RandomU => unreachable!(),
    };
    match (&g.out, a.binary) {
        (Some(path), true) => {
            field.write_binary(path)?;
            Ok(())
        }
        _ => emit(g, &to_json(&field.to_file(), g.pretty)?),
    }
}

fn read_input(path: &Path) -> Outcome<Vec<u8>> {
    std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn analyze(g: &Global, input: &Path) -> Outcome<()> {
    let tol = tolerances(g)?;
    let bytes = read_input(input)?;
    let mut inputs = vec![InputHash::of(&input.display().to_string(), &bytes)];
    let value: serde_json::Value = serde_json::from_slice(&bytes).map_err(Error::from)?;
    let tool = format!("agtool {}", env!("CARGO_PKG_VERSION"));
    let report = if value.get("slots").is_some() {
        let file: TensorFile = serde_json::from_value(value).map_err(Error::from)?;
        let u = RawCoefficients::new(IndexedTensor::try_from(file)?, tol.constraint)?;
        let r = analyze_raw(&u, tol)?;
        let prov = Provenance {
            tool,
            inputs,
            tolerances: tol,
            grid: None,
            layout: None,
        };
        AnalysisReport::new(InputKind::RawCoefficients, r, prov)
    } else {
        let file: FieldFile = serde_json::from_value(value).map_err(Error::from)?;
        let base = input.parent().unwrap_or(Path::new("."));
        if let Some(bin) = &file.binary {
            let path = base.join(bin);
            inputs.push(InputHash::of(&path.display().to_string(), &read_input(&path)?));
        }
        let field = CoframeField::from_file(file, base)?;
        let r = analyze_field(&field, tol)?;
        let layout = match field.layout() {
            Layout::Full => "full".to_string(),
            Layout::Sparse { indices } => format!("sparse, {} nodes", indices.len()),
        };
        let prov = Provenance {
            tool,
            inputs,
            tolerances: tol,
            grid: Some(field.grid().clone()),
            layout: Some(layout),
        };
        AnalysisReport::new(InputKind::CoframeField, r, prov)
    };
    if g.pretty {
        eprint!("{}", report.table());
    }
    emit(g, &to_json(&report, g.pretty)?)
}

fn guards(g: &Global) -> Outcome<()> {
    let s = signature(g)?;
    let r = GuardReport::new(s, determinant_guards(s));
    if g.pretty {
        eprint!("{}", r.table());
    }
    emit(g, &to_json(&r, g.pretty)?)
}

fn verify(g: &Global, suite: SuiteArg, reps: usize) -> Outcome<()> {
    if reps == 0 {
        return usage("--reps must be positive");
    }
    let suite = match suite {
        SuiteArg::Core => Suite::Core,
        SuiteArg::Geometry => Suite::Geometry,
        SuiteArg::Pipeline => Suite::Pipeline,
    };
    let r = run_suite(suite, g.seed, reps, tolerances(g)?)?;
    eprint!("{}", report::suite_table(&r));
    emit(g, &to_json(&r, g.pretty)?)?;
    if r.passed {
        Ok(())
    } else {
        Err(Failure::Failed("verification failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Generate(a) => generate(g, a),
        Command::Analyze { input } => analyze(g, input),
        Command::Guards => guards(g),
        Command::Verify { suite, reps } => verify(g, *suite, *reps),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("agtool: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
