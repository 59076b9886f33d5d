//! Command-line front end for the paracone toolkit.
//!
//! Reports are self-describing JSON (full parameter echo plus a timestamp);
//! traces are plot-ready CSV. Exit status: 0 on pass/converged, 1 on
//! fail/diverged, 2 on usage or input errors. Runs with equal configuration
//! and seed produce identical reports up to the timestamp field.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use paracone::*;

#[derive(Parser)]
#[command(
    name = "paracone",
    version,
    about = "Checks cone-paraconvexity inequalities and estimates directional derivatives"
)]
struct Cli {
    /// JSON config file supplying defaults; command-line flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed (default: config file, then PARACONE_SEED, then 7)
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the strong paraconvexity inequality on a sampling plan
    #[command(name = "check-paraconvex")]
    CheckParaconvex(CheckArgs),
    /// Check plain cone-convexity (the C = 0 case)
    #[command(name = "check-convex")]
    CheckConvex(ConvexArgs),
    /// Estimate the smallest defect constant that passes on the plan
    #[command(name = "estimate-C", alias = "estimate-c")]
    EstimateC(EstimateArgs),
    /// Estimate the one-sided directional derivative with certificates
    Dderiv(DderivArgs),
    /// Load a cone file and report its derived geometry
    #[command(name = "cone-info")]
    ConeInfo(ConeInfoArgs),
    /// Run the full built-in corpus suite and print a summary table
    #[command(name = "corpus-run")]
    CorpusRun(CorpusRunArgs),
}

#[derive(Args, Clone, Default)]
struct CheckArgs {
    /// Corpus entry name or path to a polynomial mapping JSON file
    #[arg(long)]
    mapping: Option<String>,
    /// Cone JSON file (defaults to the corpus entry's cone)
    #[arg(long)]
    cone: Option<PathBuf>,
    /// Modulus spec, e.g. pow:2
    #[arg(long)]
    alpha: Option<String>,
    /// Defect constant
    #[arg(long = "C")]
    c: Option<f64>,
    /// Defect direction, comma-separated coordinates, e.g. 1,0
    #[arg(long)]
    k0: Option<String>,
    /// Defect weight: min or product
    #[arg(long)]
    form: Option<String>,
    /// Sampling plan: default, light or dense
    #[arg(long)]
    grid: Option<String>,
    /// Norm on the input space: euclidean or sup
    #[arg(long)]
    norm: Option<String>,
    /// Write the JSON report here (otherwise printed to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct DderivArgs {
    #[arg(long)]
    mapping: Option<String>,
    #[arg(long)]
    cone: Option<PathBuf>,
    /// Base point, comma-separated
    #[arg(long)]
    x0: Option<String>,
    /// Direction, comma-separated (normalized internally)
    #[arg(long)]
    h: Option<String>,
    #[arg(long = "C")]
    c: Option<f64>,
    #[arg(long)]
    k0: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Convergence tolerance for the Cauchy gap and correction tail
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    t_start: Option<f64>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the quotient trace as CSV here
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct ConvexArgs {
    /// Corpus entry name or path to a polynomial mapping JSON file
    #[arg(long)]
    mapping: Option<String>,
    /// Cone JSON file (defaults to the corpus entry's cone)
    #[arg(long)]
    cone: Option<PathBuf>,
    /// Sampling plan: default, light or dense
    #[arg(long)]
    grid: Option<String>,
    /// Write the JSON report here (otherwise printed to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct EstimateArgs {
    /// Corpus entry name or path to a polynomial mapping JSON file
    #[arg(long)]
    mapping: Option<String>,
    /// Cone JSON file (defaults to the corpus entry's cone)
    #[arg(long)]
    cone: Option<PathBuf>,
    /// Modulus spec, e.g. pow:2
    #[arg(long)]
    alpha: Option<String>,
    /// Defect direction, comma-separated coordinates, e.g. 1,0
    #[arg(long)]
    k0: Option<String>,
    /// Defect weight: min or product
    #[arg(long)]
    form: Option<String>,
    /// Sampling plan: default, light or dense
    #[arg(long)]
    grid: Option<String>,
    /// Norm on the input space: euclidean or sup
    #[arg(long)]
    norm: Option<String>,
    /// Write the JSON report here (otherwise printed to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct ConeInfoArgs {
    #[arg(long)]
    cone: Option<PathBuf>,
    /// Samples for the normality estimate
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct CorpusRunArgs {
    /// Run every corpus entry
    #[arg(long)]
    all: bool,
    /// Run a single entry by name
    #[arg(long)]
    entry: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Values a config file may supply; flags override every one of them.
#[derive(Deserialize, Default)]
struct FileConfig {
    mapping: Option<String>,
    cone: Option<PathBuf>,
    alpha: Option<String>,
    #[serde(rename = "C")]
    c: Option<f64>,
    k0: Option<CoordsOrText>,
    form: Option<String>,
    grid: Option<String>,
    norm: Option<String>,
    seed: Option<u64>,
    x0: Option<CoordsOrText>,
    h: Option<CoordsOrText>,
    tol: Option<f64>,
    t_start: Option<f64>,
    ratio: Option<f64>,
    steps: Option<usize>,
    samples: Option<usize>,
    out: Option<PathBuf>,
    trace: Option<PathBuf>,
}

#[derive(Deserialize, Clone)]
#[serde(untagged)]
enum CoordsOrText {
    Coords(Vec<f64>),
    Text(String),
}

impl CoordsOrText {
    fn into_text(self) -> String {
        match self {
            CoordsOrText::Text(t) => t,
            CoordsOrText::Coords(c) => c
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

/// Anything that should terminate the run with a non-zero status.
enum Failure {
    /// Exit 2: bad usage, unknown resources, malformed input.
    Input(String),
    /// Exit 1: a check failed or an estimate diverged (already reported).
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;
type RunResult = CliResult<()>;

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(Failure::Check) => 1,
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> RunResult {
    let config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::Input(format!("config file {}: {e}", path.display()))
            })?;
            serde_json::from_str::<FileConfig>(&text)
                .map_err(|e| Failure::Input(format!("config file {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let seed = cli
        .seed
        .or(config.seed)
        .or_else(|| {
            std::env::var("PARACONE_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(7);

    match cli.command {
        Command::CheckParaconvex(args) => check_command(merge_check(args, &config), seed),
        Command::CheckConvex(args) => convex_command(merge_convex(args, &config), seed),
        Command::EstimateC(args) => estimate_command(merge_estimate(args, &config), seed),
        Command::Dderiv(args) => dderiv_command(merge_dderiv(args, &config), seed),
        Command::ConeInfo(mut args) => {
            args.cone = args.cone.or_else(|| config.cone.clone());
            args.samples = args.samples.or(config.samples);
            cone_info_command(args, seed)
        }
        Command::CorpusRun(args) => corpus_run_command(args, seed),
    }
}

fn merge_check(mut args: CheckArgs, config: &FileConfig) -> CheckArgs {
    args.mapping = args.mapping.or_else(|| config.mapping.clone());
    args.cone = args.cone.or_else(|| config.cone.clone());
    args.alpha = args.alpha.or_else(|| config.alpha.clone());
    args.c = args.c.or(config.c);
    args.k0 = args
        .k0
        .or_else(|| config.k0.clone().map(CoordsOrText::into_text));
    args.form = args.form.or_else(|| config.form.clone());
    args.grid = args.grid.or_else(|| config.grid.clone());
    args.norm = args.norm.or_else(|| config.norm.clone());
    args.out = args.out.or_else(|| config.out.clone());
    args
}

fn merge_convex(mut args: ConvexArgs, config: &FileConfig) -> ConvexArgs {
    args.mapping = args.mapping.or_else(|| config.mapping.clone());
    args.cone = args.cone.or_else(|| config.cone.clone());
    args.grid = args.grid.or_else(|| config.grid.clone());
    args.out = args.out.or_else(|| config.out.clone());
    args
}

fn merge_estimate(mut args: EstimateArgs, config: &FileConfig) -> EstimateArgs {
    args.mapping = args.mapping.or_else(|| config.mapping.clone());
    args.cone = args.cone.or_else(|| config.cone.clone());
    args.alpha = args.alpha.or_else(|| config.alpha.clone());
    args.k0 = args
        .k0
        .or_else(|| config.k0.clone().map(CoordsOrText::into_text));
    args.form = args.form.or_else(|| config.form.clone());
    args.grid = args.grid.or_else(|| config.grid.clone());
    args.norm = args.norm.or_else(|| config.norm.clone());
    args.out = args.out.or_else(|| config.out.clone());
    args
}

fn merge_dderiv(mut args: DderivArgs, config: &FileConfig) -> DderivArgs {
    args.mapping = args.mapping.or_else(|| config.mapping.clone());
    args.cone = args.cone.or_else(|| config.cone.clone());
    args.alpha = args.alpha.or_else(|| config.alpha.clone());
    args.c = args.c.or(config.c);
    args.k0 = args
        .k0
        .or_else(|| config.k0.clone().map(CoordsOrText::into_text));
    args.x0 = args
        .x0
        .or_else(|| config.x0.clone().map(CoordsOrText::into_text));
    args.h = args
        .h
        .or_else(|| config.h.clone().map(CoordsOrText::into_text));
    args.tol = args.tol.or(config.tol);
    args.t_start = args.t_start.or(config.t_start);
    args.ratio = args.ratio.or(config.ratio);
    args.steps = args.steps.or(config.steps);
    args.out = args.out.or_else(|| config.out.clone());
    args.trace = args.trace.or_else(|| config.trace.clone());
    args
}

fn parse_coords(text: &str, what: &str) -> CliResult<Vector> {
    let coords: std::result::Result<Vec<f64>, _> = text
        .split(',')
        .map(|part| part.trim().parse::<f64>())
        .collect();
    match coords {
        Ok(c) if !c.is_empty() && c.iter().all(|v| v.is_finite()) => Ok(Vector(c)),
        _ => Err(Failure::Input(format!(
            "could not parse {what} from '{text}' (expected comma-separated finite numbers)"
        ))),
    }
}

fn load_mapping(spec: &str) -> CliResult<MappingSpec> {
    if !spec.contains('/') && !spec.ends_with(".json") {
        return corpus_get(spec).map_err(|_| {
            Failure::Input(format!(
                "unknown mapping '{spec}': not a corpus entry ({}) and not a file",
                corpus_names().map(|n| n.join(", ")).unwrap_or_default()
            ))
        });
    }
    let path = Path::new(spec);
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("mapping file {spec}: {e}")))?;
    paracone::corpus::from_polynomial_json(&text).map_err(Failure::from)
}

fn load_cone(args_cone: &Option<PathBuf>, mapping: &MappingSpec) -> CliResult<ConeDescriptor> {
    if let Some(path) = args_cone {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cone file {}: {e}", path.display())))?;
        return ConeDescriptor::from_json(&text).map_err(Failure::from);
    }
    mapping.cone().cloned().ok_or_else(|| {
        Failure::Input(format!(
            "mapping '{}' carries no cone; pass --cone <file>",
            mapping.name()
        ))
    })
}

fn parse_grid(spec: Option<&str>, seed: u64) -> CliResult<SamplingPlan> {
    let plan = match spec.unwrap_or("default") {
        "default" => SamplingPlan::default_plan(),
        "light" => SamplingPlan::light(),
        "dense" => SamplingPlan {
            lambdas: {
                let mut l = vec![0.0];
                l.extend((1..=39).map(|i| i as f64 / 40.0));
                l.push(1.0);
                l
            },
            uniform_points_per_dim: 13,
            geometric_levels: 10,
            random_triples: 2000,
            seed: 0,
        },
        other => {
            return Err(Failure::Input(format!(
                "unknown grid '{other}' (expected default, light or dense)"
            )))
        }
    };
    Ok(plan.with_seed(seed))
}

fn parse_norm(spec: Option<&str>) -> CliResult<NormChoice> {
    match spec.unwrap_or("euclidean") {
        "euclidean" => Ok(NormChoice::Euclidean),
        "sup" => Ok(NormChoice::Sup),
        other => Err(Failure::Input(format!(
            "unknown norm '{other}' (expected euclidean or sup)"
        ))),
    }
}

fn timestamp() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn emit<T: Serialize>(out: &Option<PathBuf>, payload: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(payload)
        .map_err(|e| Failure::Input(format!("report serialization: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => {
            fs::write(path, &text)
                .map_err(|e| Failure::Input(format!("writing {}: {e}", path.display())))?;
            println!("report written to {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckOutput {
    command: String,
    mapping: String,
    #[serde(flatten)]
    report: CheckReport,
    seed: u64,
    timestamp: f64,
}

fn check_command(args: CheckArgs, seed: u64) -> RunResult {
    let mapping_ref = args
        .mapping
        .as_deref()
        .ok_or_else(|| Failure::Input("--mapping is required".into()))?;
    let mapping = load_mapping(mapping_ref)?;
    let cone = load_cone(&args.cone, &mapping)?;
    let plan = parse_grid(args.grid.as_deref(), seed)?;
    let alpha = Modulus::parse(args.alpha.as_deref().unwrap_or("pow:2"))?;
    let c = args.c.unwrap_or(1.0);
    let k0 = match &args.k0 {
        Some(text) => parse_coords(text, "k0")?,
        None => default_k0(&mapping)?,
    };
    let form = DefectForm::parse(args.form.as_deref().unwrap_or("min"))?;
    let norm = parse_norm(args.norm.as_deref())?;
    let report = check_paraconvex(&mapping, &cone, &alpha, c, &k0, form, norm, &plan)?;
    let passed = report.passed;
    emit(
        &args.out,
        &CheckOutput {
            command: "check-paraconvex".into(),
            mapping: mapping.name().to_string(),
            report,
            seed,
            timestamp: timestamp(),
        },
    )?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn convex_command(args: ConvexArgs, seed: u64) -> RunResult {
    let mapping_ref = args
        .mapping
        .as_deref()
        .ok_or_else(|| Failure::Input("--mapping is required".into()))?;
    let mapping = load_mapping(mapping_ref)?;
    let cone = load_cone(&args.cone, &mapping)?;
    let plan = parse_grid(args.grid.as_deref(), seed)?;
    let report = check_cone_convex(&mapping, &cone, &plan)?;
    let passed = report.passed;
    emit(
        &args.out,
        &CheckOutput {
            command: "check-convex".into(),
            mapping: mapping.name().to_string(),
            report,
            seed,
            timestamp: timestamp(),
        },
    )?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn default_k0(mapping: &MappingSpec) -> CliResult<Vector> {
    mapping
        .metadata
        .as_ref()
        .and_then(|m| m.known_k0.clone())
        .ok_or_else(|| Failure::Input("no --k0 given and the mapping metadata has none".into()))
}

#[derive(Serialize)]
struct EstimateOutput {
    command: String,
    mapping: String,
    c_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    infeasible: Option<String>,
    form: String,
    alpha: String,
    k0: Vector,
    seed: u64,
    timestamp: f64,
}

fn estimate_command(args: EstimateArgs, seed: u64) -> RunResult {
    let mapping_ref = args
        .mapping
        .as_deref()
        .ok_or_else(|| Failure::Input("--mapping is required".into()))?;
    let mapping = load_mapping(mapping_ref)?;
    let cone = load_cone(&args.cone, &mapping)?;
    let plan = parse_grid(args.grid.as_deref(), seed)?;
    let alpha = Modulus::parse(args.alpha.as_deref().unwrap_or("pow:2"))?;
    let k0 = match &args.k0 {
        Some(text) => parse_coords(text, "k0")?,
        None => default_k0(&mapping)?,
    };
    let form = DefectForm::parse(args.form.as_deref().unwrap_or("min"))?;
    let norm = parse_norm(args.norm.as_deref())?;
    let estimate = estimate_min_c(&mapping, &cone, &alpha, &k0, form, norm, &plan);
    let (c_hat, infeasible) = match estimate {
        Ok(value) => (Some(value), None),
        Err(Error::NoFiniteConstant(detail)) => (None, Some(detail)),
        Err(e) => return Err(e.into()),
    };
    let feasible = c_hat.is_some();
    emit(
        &args.out,
        &EstimateOutput {
            command: "estimate-C".into(),
            mapping: mapping.name().to_string(),
            c_hat,
            infeasible,
            form: form.to_string(),
            alpha: alpha.label().to_string(),
            k0,
            seed,
            timestamp: timestamp(),
        },
    )?;
    if feasible {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

#[derive(Serialize)]
struct Subchecks {
    monotone: CheckReport,
    lower_bound: Option<CheckReport>,
}

#[derive(Serialize)]
struct DderivOutput {
    command: String,
    mapping: String,
    value: Vector,
    converged: bool,
    cauchy_gap: f64,
    correction_tail: f64,
    delta: f64,
    subchecks: Subchecks,
    params: DderivParams,
    seed: u64,
    timestamp: f64,
}

#[derive(Serialize)]
struct DderivParams {
    x0: Vector,
    h: Vector,
    c: f64,
    k0: Vector,
    alpha: String,
    tol: f64,
    t_start: f64,
    ratio: f64,
    steps: usize,
}

fn dderiv_command(args: DderivArgs, seed: u64) -> RunResult {
    let mapping_ref = args
        .mapping
        .as_deref()
        .ok_or_else(|| Failure::Input("--mapping is required".into()))?;
    let mapping = load_mapping(mapping_ref)?;
    let cone = load_cone(&args.cone, &mapping)?;
    let x0 = match &args.x0 {
        Some(text) => parse_coords(text, "x0")?,
        None => return Err(Failure::Input("--x0 is required".into())),
    };
    let h = match &args.h {
        Some(text) => parse_coords(text, "h")?,
        None => return Err(Failure::Input("--h is required".into())),
    };
    let meta = mapping.metadata.clone();
    let c = args
        .c
        .or_else(|| meta.as_ref().and_then(|m| m.known_c))
        .ok_or_else(|| Failure::Input("--C is required (no certified constant known)".into()))?;
    let k0 = match &args.k0 {
        Some(text) => parse_coords(text, "k0")?,
        None => default_k0(&mapping)?,
    };
    let alpha = Modulus::parse(args.alpha.as_deref().unwrap_or("pow:2"))?;
    let config = EstimatorConfig {
        t_start: args.t_start.unwrap_or(0.5),
        ratio: args.ratio.unwrap_or(0.5),
        max_steps: args.steps.unwrap_or(40),
        tol: args.tol.unwrap_or(1e-6),
    };
    let estimate =
        estimate_directional_derivative(&mapping, &x0, &h, c, &k0, &alpha, &cone, &config)?;

    if let Some(path) = &args.trace {
        write_trace_csv(path, &estimate.trace, &cone).map_err(Failure::Input)?;
    }

    let passed = estimate.converged
        && estimate.monotone.passed
        && estimate.lower_bound.as_ref().is_none_or(|r| r.passed);
    emit(
        &args.out,
        &DderivOutput {
            command: "dderiv".into(),
            mapping: mapping.name().to_string(),
            value: estimate.value.clone(),
            converged: estimate.converged,
            cauchy_gap: estimate.cauchy_gap,
            correction_tail: estimate.correction_tail,
            delta: estimate.trace.delta,
            subchecks: Subchecks {
                monotone: estimate.monotone.clone(),
                lower_bound: estimate.lower_bound.clone(),
            },
            params: DderivParams {
                x0,
                h,
                c,
                k0,
                alpha: alpha.label().to_string(),
                tol: config.tol,
                t_start: config.t_start,
                ratio: config.ratio,
                steps: config.max_steps,
            },
            seed,
            timestamp: timestamp(),
        },
    )?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

/// Columns: t, raw_1..raw_m, corrected_1..corrected_m, monotone_slack.
/// The slack column holds the consecutive-pair inclusion slack; the first
/// row has no predecessor and stays empty.
fn write_trace_csv(path: &Path, trace: &QuotientTrace, cone: &ConeDescriptor) -> std::result::Result<(), String> {
    let m = trace.raw_quotients[0].dim();
    let mut writer = csv::Writer::from_path(path).map_err(|e| e.to_string())?;
    let mut headers = vec!["t".to_string()];
    headers.extend((1..=m).map(|i| format!("raw_{i}")));
    headers.extend((1..=m).map(|i| format!("corrected_{i}")));
    headers.push("monotone_slack".to_string());
    writer.write_record(&headers).map_err(|e| e.to_string())?;
    for i in 0..trace.len() {
        let mut row = vec![trace.t_values[i].to_string()];
        row.extend(trace.raw_quotients[i].iter().map(|v| v.to_string()));
        row.extend(trace.corrected_quotients[i].iter().map(|v| v.to_string()));
        if i == 0 {
            row.push(String::new());
        } else {
            let v = trace.corrected_quotients[i - 1]
                .sub(&trace.corrected_quotients[i])
                .add(&trace.correction(i));
            let slack = cone.member(&v).map_err(|e| e.to_string())?.slack;
            row.push(slack.to_string());
        }
        writer.write_record(&row).map_err(|e| e.to_string())?;
    }
    writer.flush().map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ConeInfoOutput {
    command: String,
    dim: usize,
    pointed: bool,
    facet_normals: Vec<Vector>,
    generators: Option<Vec<Vector>>,
    membership_tol: f64,
    dual: Option<ConeDescriptor>,
    normality_estimate: Option<NormalityEstimates>,
    well_based_witness: Option<Vector>,
    seed: u64,
    timestamp: f64,
}

#[derive(Serialize)]
struct NormalityEstimates {
    euclidean: f64,
    sup: f64,
    samples: usize,
}

fn cone_info_command(args: ConeInfoArgs, seed: u64) -> RunResult {
    let path = args
        .cone
        .ok_or_else(|| Failure::Input("--cone <file> is required".into()))?;
    let text = fs::read_to_string(&path)
        .map_err(|e| Failure::Input(format!("cone file {}: {e}", path.display())))?;
    let cone = ConeDescriptor::from_json(&text)?;
    let samples = args.samples.unwrap_or(20_000);
    let pointed = cone.is_pointed();
    let normality = if pointed {
        let euclidean = cone.estimate_normality_constant(NormChoice::Euclidean, samples, seed);
        let sup = cone.estimate_normality_constant(NormChoice::Sup, samples, seed);
        match (euclidean, sup) {
            (Ok(e), Ok(s)) => Some(NormalityEstimates {
                euclidean: e,
                sup: s,
                samples,
            }),
            _ => None,
        }
    } else {
        None
    };
    emit(
        &args.out,
        &ConeInfoOutput {
            command: "cone-info".into(),
            dim: cone.dim,
            pointed,
            facet_normals: cone.facet_normals.clone(),
            generators: cone.effective_generators(),
            membership_tol: cone.membership_tol,
            dual: cone.dual_cone().ok(),
            normality_estimate: normality,
            well_based_witness: cone
                .well_based_witness(NormChoice::Euclidean)
                .map(|w| w.coeffs),
            seed,
            timestamp: timestamp(),
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct CorpusRow {
    entry: String,
    check: String,
    status: String,
    expected: String,
    ok: bool,
}

#[derive(Serialize)]
struct CorpusOutput {
    command: String,
    rows: Vec<CorpusRow>,
    all_ok: bool,
    seed: u64,
    timestamp: f64,
}

fn corpus_run_command(args: CorpusRunArgs, seed: u64) -> RunResult {
    let names = match (&args.entry, args.all) {
        (Some(name), _) => vec![name.clone()],
        (None, _) => corpus_names().map_err(Failure::from)?,
    };
    let plan = SamplingPlan::default_plan().with_seed(seed);
    let alpha = Modulus::power(2.0).map_err(Failure::from)?;
    let mut rows = Vec::new();

    for name in &names {
        let mapping = load_mapping(name)?;
        let meta = mapping
            .metadata
            .clone()
            .ok_or_else(|| Failure::Input(format!("{name}: no metadata")))?;
        let cone = meta
            .cone
            .clone()
            .ok_or_else(|| Failure::Input(format!("{name}: no cone")))?;
        let k0 = meta
            .known_k0
            .clone()
            .ok_or_else(|| Failure::Input(format!("{name}: no k0")))?;

        if meta.negative_control {
            for c in [1.0, 10.0, 100.0] {
                let rep = check_paraconvex(
                    &mapping,
                    &cone,
                    &alpha,
                    c,
                    &k0,
                    DefectForm::Min,
                    NormChoice::Euclidean,
                    &plan,
                )
                .map_err(Failure::from)?;
                rows.push(CorpusRow {
                    entry: name.clone(),
                    check: format!("paraconvex C={c}"),
                    status: verdict(rep.passed),
                    expected: "fail".into(),
                    ok: !rep.passed,
                });
            }
            let witness = search_violation(
                &mapping,
                &cone,
                &alpha,
                10.0,
                &k0,
                DefectForm::Min,
                NormChoice::Euclidean,
                10_000,
                seed,
            )
            .map_err(Failure::from)?;
            rows.push(CorpusRow {
                entry: name.clone(),
                check: "violation search C=10".into(),
                status: witness
                    .as_ref()
                    .map(|w| format!("witness |x1-x2|={:.4}", (w.x1[0] - w.x2[0]).abs()))
                    .unwrap_or_else(|| "none".into()),
                expected: "witness".into(),
                ok: witness.is_some(),
            });
            continue;
        }

        let c = meta
            .known_c
            .ok_or_else(|| Failure::Input(format!("{name}: certified entry without C")))?;
        let rep = check_paraconvex(
            &mapping,
            &cone,
            &alpha,
            c,
            &k0,
            DefectForm::Min,
            NormChoice::Euclidean,
            &plan,
        )
        .map_err(Failure::from)?;
        rows.push(CorpusRow {
            entry: name.clone(),
            check: format!("paraconvex C={c}"),
            status: verdict(rep.passed),
            expected: "pass".into(),
            ok: rep.passed,
        });

        let c_hat = estimate_min_c(
            &mapping,
            &cone,
            &alpha,
            &k0,
            DefectForm::Min,
            NormChoice::Euclidean,
            &plan,
        )
        .map_err(Failure::from)?;
        rows.push(CorpusRow {
            entry: name.clone(),
            check: "estimate-C".into(),
            status: format!("{c_hat:.6}"),
            expected: format!("<= {c}"),
            ok: c_hat <= c + 1e-9,
        });

        let config = EstimatorConfig::default();
        // aggregate the certificate trail over all anchors
        let mut monotone_worst = f64::INFINITY;
        let mut monotone_ok = true;
        let mut bound_worst = f64::INFINITY;
        let mut bound_ok = true;
        let mut lemma_ok = true;
        for (x0, h) in meta.trace_anchors.iter() {
            let est = estimate_directional_derivative(
                &mapping, x0, h, c, &k0, &alpha, &cone, &config,
            )
            .map_err(Failure::from)?;
            let analytic_err = mapping
                .analytic_dderiv(x0, h)
                .map(|a| est.value.sub(&a).norm2());
            let ok = est.converged
                && est.monotone.passed
                && analytic_err.is_none_or(|e| e <= 1e-5);
            rows.push(CorpusRow {
                entry: name.clone(),
                check: format!("dderiv @ {:?}", x0.0),
                status: format!(
                    "value {:?}, err {}",
                    est.value.0,
                    analytic_err
                        .map(|e| format!("{e:.2e}"))
                        .unwrap_or_else(|| "n/a".into())
                ),
                expected: "converged, |err| <= 1e-5".into(),
                ok,
            });

            monotone_worst = monotone_worst.min(est.monotone.worst_slack);
            monotone_ok &= est.monotone.passed;
            if let Some(bound) = &est.lower_bound {
                bound_worst = bound_worst.min(bound.worst_slack);
                bound_ok &= bound.passed;
            }
            let phi: Vec<(f64, Vector)> = est
                .trace
                .t_values
                .iter()
                .zip(&est.trace.corrected_quotients)
                .map(|(&t, q)| (t, q.sub(&est.value)))
                .collect();
            let lemma = check_lemma_trace(&phi, &cone, &k0.scale(c), &alpha, config.tol)
                .map_err(Failure::from)?;
            lemma_ok &= lemma.passed;
        }
        rows.push(CorpusRow {
            entry: name.clone(),
            check: "quotient monotonicity".into(),
            status: format!("worst slack {monotone_worst:.2e}"),
            expected: "pass".into(),
            ok: monotone_ok,
        });
        rows.push(CorpusRow {
            entry: name.clone(),
            check: "quotient lower bound".into(),
            status: format!("worst slack {bound_worst:.2e}"),
            expected: "pass".into(),
            ok: bound_ok,
        });
        rows.push(CorpusRow {
            entry: name.clone(),
            check: "lemma implication".into(),
            status: verdict(lemma_ok),
            expected: "pass".into(),
            ok: lemma_ok,
        });
    }

    let all_ok = rows.iter().all(|r| r.ok);
    print_table(&rows);
    if let Some(path) = &args.out {
        emit(
            &Some(path.clone()),
            &CorpusOutput {
                command: "corpus-run".into(),
                rows,
                all_ok,
                seed,
                timestamp: timestamp(),
            },
        )?;
    }
    if all_ok {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn verdict(passed: bool) -> String {
    if passed { "pass".into() } else { "fail".into() }
}

fn print_table(rows: &[CorpusRow]) {
    let widths = rows.iter().fold((5, 5, 6), |acc, r| {
        (
            acc.0.max(r.entry.len()),
            acc.1.max(r.check.len()),
            acc.2.max(r.status.len()),
        )
    });
    println!(
        "{:<w0$}  {:<w1$}  {:<w2$}  {:<10}  ok",
        "entry",
        "check",
        "status",
        "expected",
        w0 = widths.0,
        w1 = widths.1,
        w2 = widths.2
    );
    for r in rows {
        println!(
            "{:<w0$}  {:<w1$}  {:<w2$}  {:<10}  {}",
            r.entry,
            r.check,
            r.status,
            r.expected,
            if r.ok { "yes" } else { "NO" },
            w0 = widths.0,
            w1 = widths.1,
            w2 = widths.2
        );
    }
}
