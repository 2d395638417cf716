//! `formalitykit`: exact Hochschild cohomology, Tor and formality certificates
//! from the command line. Reports go to stdout; errors go to stderr with exit
//! code 2 (input) or 3 (resource cap).

mod output;
mod sweep;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use formalitykit_core::algebra::AlgebraDoc;
use formalitykit_core::config::{self, ConfigGraph, GraphDoc, PoincarePolynomial};
use formalitykit_core::formality::{self, FormalityCertificate};
use formalitykit_core::hochschild::{self, BarMode, HhOptions, PeriodicResolutionSpec, ResolutionDoc};
use formalitykit_core::presentation::{PresentationDoc, TensorPresentation};
use formalitykit_core::{Error, ErrorKind, Field, FieldSpec, Fp, GradedBimodule, Preset, Rational};

use output::{Format, Report};

#[derive(Parser, Debug)]
#[command(name = "formalitykit", version, about = "Exact intrinsic-formality computations for graded algebras")]
struct Cli {
    /// Coefficient field: `rationals` or `fp:P`. Defaults to the input's own
    /// field, else the rationals.
    #[arg(long, global = true)]
    field: Option<FieldSpec>,

    /// Cap on the number of tensor words in any single slice.
    #[arg(long, global = true, default_value_t = hochschild::DEFAULT_MAX_WORDS)]
    max_words: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// dim HH^{p,q}(A, A(shift)) from the bar complex or a periodic resolution.
    Hh(HhArgs),
    /// dim HH^{q,2-q}(A, A) for 3 ≤ q ≤ qmax.
    Scan(ScanArgs),
    /// Tor_q^A(R, R) from a tensor presentation.
    Tor(TorArgs),
    /// Build a formality certificate.
    #[command(subcommand)]
    Certify(CertifyCommand),
    /// Replay a certificate.
    Recheck(RecheckArgs),
    /// Shift the objects of a configuration so every edge has degree nk/2.
    Normalize(NormalizeArgs),
    /// Signs ε with ε_u ε_v = (-1)^d on every edge.
    Signs(GraphArgs),
    /// Graded Hom between n-th equivariant powers, by Poincaré data.
    Kunneth(KunnethArgs),
    /// Structure constants (or a presentation) of a configuration algebra.
    BuildConfig(BuildConfigArgs),
    /// Certify over a grid of parameters.
    #[command(subcommand)]
    Sweep(sweep::SweepCommand),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Relative,
    Absolute,
}

impl From<ModeArg> for BarMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Relative => BarMode::RelativeNormalized,
            ModeArg::Absolute => BarMode::Absolute,
        }
    }
}

#[derive(Args, Debug)]
struct HhArgs {
    #[arg(long)]
    algebra: PathBuf,
    #[arg(long)]
    p: usize,
    #[arg(long, allow_negative_numbers = true)]
    q: i64,
    #[arg(long, value_enum, default_value_t = ModeArg::Relative)]
    mode: ModeArg,
    /// Coefficients in the shifted bimodule A(shift).
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    shift: i64,
    /// Use this free resolution instead of the bar complex.
    #[arg(long)]
    resolution: Option<PathBuf>,
    /// Include cohomology representatives (bar complex only).
    #[arg(long)]
    cocycles: bool,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    algebra: PathBuf,
    #[arg(long)]
    qmax: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Relative)]
    mode: ModeArg,
}

#[derive(Args, Debug)]
struct TorArgs {
    #[arg(long)]
    pres: PathBuf,
    #[arg(long)]
    q: usize,
}

#[derive(Subcommand, Debug)]
enum CertifyCommand {
    /// k[t]/t^{n+1} with deg t = k.
    Single {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        k: i64,
    },
    /// Configurations of P^n[k]-like objects with edge degree h.
    PnConfig {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, allow_negative_numbers = true)]
        h: i64,
    },
    /// Configurations of k-spherelike objects with edge degrees in [hmin, hmax].
    Spherical {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        hmin: i64,
        #[arg(long)]
        hmax: i64,
    },
}

#[derive(Args, Debug)]
struct RecheckArgs {
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args, Debug)]
struct NormalizeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    nk: i64,
}

#[derive(Args, Debug)]
struct KunnethArgs {
    #[arg(long)]
    poincare: PathBuf,
    #[arg(long)]
    n: u32,
    /// Equal linearizations (symmetric power).
    #[arg(long, conflicts_with = "different", required_unless_present = "different")]
    same: bool,
    /// Linearizations differing by the sign (exterior power).
    #[arg(long)]
    different: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PresetArg {
    Orthogonal,
    Zigzag,
    Explicit,
}

#[derive(Args, Debug)]
struct BuildConfigArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: i64,
    #[arg(long)]
    h: i64,
    #[arg(long, value_enum, default_value_t = PresetArg::Orthogonal)]
    preset: PresetArg,
    /// For `--preset explicit`: JSON list of {"from", "to", "c"}.
    #[arg(long)]
    constants: Option<PathBuf>,
    /// Emit a tensor presentation truncated at this degree instead of the algebra.
    #[arg(long)]
    presentation: Option<i64>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Resource => 3,
            ErrorKind::Input | ErrorKind::Inconclusive => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Reads a JSON file, reporting the path inside the document on failure.
fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<(T, Value)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let doc = unwrap_report(&raw);
    let parsed = serde_path_to_error::deserialize(doc.clone())
        .map_err(|e| CliError::input(format!("{}: at `{}`: {}", path.display(), e.path(), e.inner())))?;
    Ok((parsed, doc))
}

/// Lets a previous report be fed back as input: the payload under
/// `result.<key>` is used when present.
fn unwrap_report(raw: &Value) -> Value {
    let Some(result) = raw.get("tool").and(raw.get("result")) else {
        return raw.clone();
    };
    for key in ["algebra", "presentation", "certificate", "graph"] {
        if let Some(v) = result.get(key) {
            return v.clone();
        }
    }
    result.clone()
}

/// Runs `$body` with `$F` bound to the scalar type selected by `$spec`.
macro_rules! with_field {
    ($spec:expr, $F:ident => $body:expr) => {
        match $spec {
            FieldSpec::Rationals => {
                type $F = Rational;
                $body
            }
            FieldSpec::PrimeField(p) => with_field!(@prime p, $F => $body;
                2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
                83, 89, 97, 101, 65521, 2147483647)
        }
    };
    (@prime $p:ident, $F:ident => $body:expr; $($q:literal),*) => {
        match $p {
            $($q => {
                type $F = Fp<$q>;
                $body
            })*
            other => Err(CliError::input(format!(
                "fp:{other} is not among the compiled prime fields (2..101, 65521, 2147483647)"
            ))),
        }
    };
}

fn field_of(cli: &Cli, doc: Option<FieldSpec>) -> FieldSpec {
    cli.field.or(doc).unwrap_or(FieldSpec::Rationals)
}

fn load_algebra<F: Field>(doc: &AlgebraDoc) -> CliResult<formalitykit_core::GradedAlgebra<F>> {
    let alg = doc.to_algebra::<F>()?;
    let report = alg.validate();
    if !report.passes() {
        let detail = serde_json::to_string(&report.violations).unwrap_or_default();
        return Err(CliError::input(format!("algebra fails validation: {detail}")));
    }
    Ok(alg)
}

fn run_hh<F: Field>(cli: &Cli, args: &HhArgs, doc: &AlgebraDoc) -> CliResult<Value> {
    let alg = load_algebra::<F>(doc)?;
    let module = GradedBimodule::regular(&alg).shifted(args.shift);
    match &args.resolution {
        Some(path) => {
            let (rdoc, _): (ResolutionDoc, _) = read_json(path)?;
            let res = PeriodicResolutionSpec::from_doc(&rdoc, &alg)?;
            res.validate(&alg)?;
            let dim = hochschild::hh_resolution(&alg, &res, &module, args.p, args.q)?;
            Ok(json!({ "p": args.p, "q": args.q, "dim": dim, "method": "resolution" }))
        }
        None => {
            let opts = HhOptions {
                max_words: cli.max_words,
                cocycles: args.cocycles,
            };
            let r = hochschild::hh_bar(&alg, &module, args.p, args.q, args.mode.into(), opts)?;
            let mut v = serde_json::to_value(r).expect("serializable");
            v["method"] = json!("bar");
            Ok(v)
        }
    }
}

fn run_scan<F: Field>(cli: &Cli, args: &ScanArgs, doc: &AlgebraDoc) -> CliResult<Value> {
    let alg = load_algebra::<F>(doc)?;
    let rows = hochschild::kadeishvili_scan(&alg, args.qmax, args.mode.into(), cli.max_words)?;
    let all_zero = rows.iter().all(|r| r.dim == 0);
    Ok(json!({ "rows": rows, "all_zero": all_zero, "mode": BarMode::from(args.mode) }))
}

fn run_tor<F: Field>(args: &TorArgs, doc: &PresentationDoc) -> CliResult<Value> {
    let pres = TensorPresentation::<F>::from_doc(doc)?;
    match pres.tor_blocks(args.q) {
        Ok(t) => {
            let blocks: Vec<Value> = t
                .blocks
                .iter()
                .map(|(&(d, s, tg), &n)| json!({ "degree": d, "src": s + 1, "tgt": tg + 1, "dim": n }))
                .collect();
            let dims: BTreeMap<String, usize> = t.dims().into_iter().map(|(d, n)| (d.to_string(), n)).collect();
            let mindeg = t.dims().keys().next().copied();
            Ok(json!({ "q": args.q, "status": "ok", "dims": dims, "blocks": blocks, "mindeg": mindeg }))
        }
        Err(Error::Inconclusive(reason)) => Ok(json!({ "q": args.q, "status": "inconclusive", "reason": reason })),
        Err(e) => Err(e.into()),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantDoc {
    from: config::VertexName,
    to: config::VertexName,
    c: formalitykit_core::algebra::CoeffDoc,
}

fn run_build_config<F: Field>(args: &BuildConfigArgs, graph: &ConfigGraph) -> CliResult<Value> {
    let preset = match args.preset {
        PresetArg::Orthogonal => Preset::Orthogonal,
        PresetArg::Zigzag => Preset::Zigzag,
        PresetArg::Explicit => {
            let path = args
                .constants
                .as_ref()
                .ok_or_else(|| CliError::input("--preset explicit needs --constants"))?;
            let (list, _): (Vec<ConstantDoc>, _) = read_json(path)?;
            let index: BTreeMap<String, usize> = (0..graph.vertex_count()).map(|i| (graph.name(i).to_string(), i)).collect();
            let lookup = |v: &config::VertexName| {
                index
                    .get(&v.to_string())
                    .copied()
                    .ok_or_else(|| CliError::input(format!("unknown vertex `{v}` in constants")))
            };
            let mut table = BTreeMap::new();
            for c in &list {
                table.insert((lookup(&c.from)?, lookup(&c.to)?), c.c.parse::<F>()?);
            }
            Preset::Explicit(table)
        }
    };
    if let Some(d) = args.presentation {
        let pres = TensorPresentation::<F>::configuration(graph, args.n, args.k, args.h, &preset, d)?;
        return Ok(json!({ "presentation": pres.to_doc() }));
    }
    let alg = formalitykit_core::build_configuration_algebra(graph, args.n, args.k, args.h, &preset)?;
    let mut doc = AlgebraDoc::from_algebra(&alg);
    doc.field = Some(F::spec());
    let mut dims: BTreeMap<String, usize> = BTreeMap::new();
    for b in alg.basis() {
        *dims.entry(b.degree.to_string()).or_insert(0) += 1;
    }
    Ok(json!({ "algebra": doc, "dims": dims, "dim": alg.dim() }))
}

fn certificate_report(command: &str, input: Value, cert: FormalityCertificate) -> Report {
    let check = formality::recheck(&cert);
    Report::new(command, input, json!({ "certificate": cert, "recheck": check }))
}

fn dispatch(cli: &Cli) -> CliResult<Report> {
    Ok(match &cli.command {
        Command::Hh(args) => {
            let (doc, raw): (AlgebraDoc, _) = read_json(&args.algebra)?;
            let spec = field_of(cli, doc.field);
            let result = with_field!(spec, F => run_hh::<F>(cli, args, &doc))?;
            let input = json!({ "algebra": raw, "p": args.p, "q": args.q, "mode": BarMode::from(args.mode),
                "shift": args.shift, "field": spec, "max_words": cli.max_words,
                "resolution": args.resolution.as_ref().map(|p| p.display().to_string()) });
            Report::new("hh", input, result)
        }
        Command::Scan(args) => {
            let (doc, raw): (AlgebraDoc, _) = read_json(&args.algebra)?;
            let spec = field_of(cli, doc.field);
            let result = with_field!(spec, F => run_scan::<F>(cli, args, &doc))?;
            let input = json!({ "algebra": raw, "qmax": args.qmax, "mode": BarMode::from(args.mode),
                "field": spec, "max_words": cli.max_words });
            Report::new("scan", input, result)
        }
        Command::Tor(args) => {
            let (doc, raw): (PresentationDoc, _) = read_json(&args.pres)?;
            let spec = field_of(cli, None);
            let result = with_field!(spec, F => run_tor::<F>(args, &doc))?;
            Report::new("tor", json!({ "presentation": raw, "q": args.q, "field": spec }), result)
        }
        Command::Certify(c) => match *c {
            CertifyCommand::Single { n, k } => {
                certificate_report("certify single", json!({ "n": n, "k": k }), formality::certify_single(n, k)?)
            }
            CertifyCommand::PnConfig { n, k, h } => certificate_report(
                "certify pn-config",
                json!({ "n": n, "k": k, "h": h }),
                formality::certify_config_pn(n, k, h)?,
            ),
            CertifyCommand::Spherical { k, hmin, hmax } => certificate_report(
                "certify spherical",
                json!({ "k": k, "hmin": hmin, "hmax": hmax }),
                formality::certify_config_spherical(k, hmin, hmax)?,
            ),
        },
        Command::Recheck(args) => {
            let (cert, raw): (FormalityCertificate, _) = read_json(&args.cert)?;
            let check = formality::recheck(&cert);
            if !check.ok {
                return Err(CliError::input(format!("certificate does not re-check: {}", check.problems.join("; "))));
            }
            Report::new("recheck", json!({ "certificate": raw }), serde_json::to_value(check).expect("serializable"))
        }
        Command::Normalize(args) => {
            let (doc, raw): (GraphDoc, _) = read_json(&args.graph)?;
            let g = ConfigGraph::from_doc(&doc)?;
            let out = config::normalize_shifts(&g, args.nk)?;
            Report::new("normalize", json!({ "graph": raw, "nk": args.nk }), serde_json::to_value(out).expect("serializable"))
        }
        Command::Signs(args) => {
            let (doc, raw): (GraphDoc, _) = read_json(&args.graph)?;
            let g = ConfigGraph::from_doc(&doc)?;
            let out = config::sign_assignment(&g)?;
            Report::new("signs", json!({ "graph": raw }), serde_json::to_value(out).expect("serializable"))
        }
        Command::Kunneth(args) => {
            let (poly, raw): (PoincarePolynomial, _) = read_json(&args.poincare)?;
            let spec = field_of(cli, None);
            config::check_characteristic(spec, args.n)?;
            let out = config::kunneth_hom(&poly, args.n, args.same)?;
            let input = json!({ "poincare": raw, "n": args.n, "same": args.same, "field": spec });
            Report::new("kunneth", input, json!({ "hom": out, "dim": out.dim() }))
        }
        Command::BuildConfig(args) => {
            let (doc, raw): (GraphDoc, _) = read_json(&args.graph)?;
            let g = ConfigGraph::from_doc(&doc)?;
            let spec = field_of(cli, None);
            let result = with_field!(spec, F => run_build_config::<F>(args, &g))?;
            let preset = format!("{:?}", args.preset).to_lowercase();
            let input = json!({ "graph": raw, "n": args.n, "k": args.k, "h": args.h, "preset": preset,
                "presentation": args.presentation, "field": spec });
            Report::new("build-config", input, result)
        }
        Command::Sweep(s) => sweep::run(s)?,
    })
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("FORMALITYKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::input(format!("FORMALITYKIT_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::input(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|_| dispatch(&cli)).and_then(|r| r.render(cli.format));
    match outcome {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
