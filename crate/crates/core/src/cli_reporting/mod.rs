//! Command-line front end of `pwldyn`: argument types, one function per
//! subcommand, structured output and the acceptance-suite runner.
//!
//! Every command returns an [`Outcome`] holding its exit code and the text
//! for standard output, so commands can be driven from tests exactly as
//! from the binary.

pub mod export;
pub mod suite;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::circle_dynamics::{period_set, period_threshold_unfloored, rotation_number, CircleError};
use crate::exact_geometry::{format_rational, parse_decimal, Point, Rational};
use crate::graph_catalog::{
    arrival_table, arrival_time, atlas_lookup, instantiate, instantiate_scaled, verify_invariance, ArrivalConfig,
    PlanarGraph, Region,
};
use crate::interval_reduction::{
    bracket_onset, entropy_of_case, lap_entropy, make_trapezoid, reduce_return_map, Onset, ReductionError,
    TrapezoidParams,
};
use crate::map_engine::{classify_orbit, normalize_params, MapParams, DEFAULT_MAX_ITERS};
use crate::markov_entropy::{analyze_graph, DEFAULT_CLOSURE_BUDGET};

pub use suite::{run_suite, CriterionResult, Suite, SuiteReport, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_INVARIANCE: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

/// Environment variable overriding the default iteration budget.
pub const BUDGET_ENV: &str = "PWLDYN_BUDGET";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse {what} {value:?}: expected an integer, p/q or a finite decimal")]
    Parse { what: &'static str, value: String },
    #[error("{0}")]
    Usage(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Unsupported(_) => EXIT_UNSUPPORTED,
            _ => EXIT_USAGE,
        }
    }
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    /// Notes for standard error, e.g. decimal inputs read as fractions.
    pub warnings: Vec<String>,
}

#[derive(Debug, Parser)]
#[command(name = "pwldyn", version, about = "Exact dynamics of F(x,y) = (|x| - y + a, x - |y| + b)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Alpha,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Fast,
    Full,
    Atlas,
}

/// The parameters `(a, b)`; values are integers, `p/q` or decimals.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the orbit of one point.
    Orbit {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify random rational points and tabulate their limit cycles.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariant graphs from the atlas (a < 0).
    Graph {
        #[command(subcommand)]
        action: GraphAction,
    },
    /// Topological entropy on the invariant graph (a < 0).
    Entropy {
        #[command(flatten)]
        params: ParamArgs,
        /// Orbit-closure budget for the Markov partition.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rotation number when the invariant graph is a circle.
    Rotation {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Periods forced by a rotation interval.
    Periods {
        #[arg(long, allow_hyphen_values = true)]
        lo: String,
        #[arg(long, allow_hyphen_values = true)]
        hi: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduction to a trapezoidal map (--b), or a trapezoidal map itself (--x --y --z).
    Trapezoid {
        #[arg(long, default_value = "-1", allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["x", "y", "z"])]
        b: Option<String>,
        #[arg(long, requires_all = ["y", "z"])]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        z: Option<String>,
        /// Lap-count depth for the entropy upper bound.
        #[arg(long, default_value_t = 24)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bracket an onset parameter of positive entropy.
    Critical {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, default_value = "1/1000")]
        tol: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        suite: SuiteArg,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Write graph, entropy and covering-matrix artifacts for one parameter.
    Export {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum GraphAction {
    /// Instantiate the atlas graph as JSON.
    Build {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check invariance and arrival times against the tabulated bounds.
    Check {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the graph as SVG, JSON and/or its covering matrix as DOT.
    Export {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

/// Settings shared by all commands after parsing and validation.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub a: Rational,
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub b: Rational,
    pub max_iters: usize,
    pub depth: usize,
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub tol: Rational,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            command: command.to_string(),
            a: -Rational::from_integer(1.into()),
            b: Rational::zero(),
            max_iters: default_budget(DEFAULT_MAX_ITERS),
            depth: 24,
            tol: Rational::new(1.into(), 1000.into()),
            format: Format::Json,
            out: None,
            seed: DEFAULT_SEED,
            warnings: Vec::new(),
        }
    }

    /// Parses a rational argument; decimals are accepted with a warning.
    pub fn rational(&mut self, what: &'static str, value: &str) -> Result<Rational, CliError> {
        let (r, decimal) = parse_decimal(value).map_err(|_| CliError::Parse { what, value: value.to_string() })?;
        if decimal {
            self.warnings.push(format!(
                "warning: --{what} {value} read as the exact fraction {}",
                format_rational(&r)
            ));
        }
        Ok(r)
    }

    fn with_params(mut self, p: &ParamArgs) -> Result<Self, CliError> {
        self.a = self.rational("a", &p.a)?;
        self.b = self.rational("b", &p.b)?;
        Ok(self)
    }

    fn with_iters(mut self, n: Option<usize>) -> Result<Self, CliError> {
        if let Some(n) = n {
            if n == 0 {
                return Err(CliError::Usage("--max-iters must be positive".into()));
            }
            self.max_iters = n;
        }
        Ok(self)
    }

    pub fn params(&self) -> MapParams {
        MapParams::new(self.a.clone(), self.b.clone())
    }

    /// Parameters rescaled to `a = -1`; other signs are outside the atlas.
    pub fn atlas_params(&self) -> Result<MapParams, CliError> {
        if !self.a.is_negative() {
            return Err(CliError::Unsupported(format!(
                "the invariant-graph atlas covers a < 0 (got a = {})",
                format_rational(&self.a)
            )));
        }
        Ok(normalize_params(&self.params()).0)
    }

    fn finish(&self, code: i32, body: String) -> Result<Outcome, CliError> {
        let stdout = match &self.out {
            Some(path) => {
                write_file(path, &body)?;
                format!("wrote {}\n", path.display())
            }
            None => body,
        };
        Ok(Outcome { code, stdout, warnings: self.warnings.clone() })
    }
}

/// Iteration budget: `PWLDYN_BUDGET` when set to a positive integer,
/// otherwise `default`.
pub fn default_budget(default: usize) -> usize {
    std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0).unwrap_or(default)
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, body).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn pretty<T: Serialize>(v: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn show(p: &Point) -> String {
    format!("({}, {})", format_rational(&p.x), format_rational(&p.y))
}

/// Dispatches a parsed command line.
pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Orbit { params, x, y, max_iters, format, out } => {
            let mut cfg = RunConfig::new("orbit").with_params(&params)?.with_iters(max_iters)?;
            let p = Point::new(cfg.rational("x", &x)?, cfg.rational("y", &y)?);
            cfg.format = format;
            cfg.out = out;
            cmd_orbit(&cfg, &p)
        }
        Command::Classify { params, samples, seed, max_iters, out } => {
            let mut cfg = RunConfig::new("classify").with_params(&params)?.with_iters(max_iters)?;
            cfg.seed = seed;
            cfg.out = out;
            cmd_classify(&cfg, samples)
        }
        Command::Graph { action } => match action {
            GraphAction::Build { params, out } => {
                let mut cfg = RunConfig::new("graph build").with_params(&params)?;
                cfg.out = out;
                cmd_graph_build(&cfg)
            }
            GraphAction::Check { params, out } => {
                let mut cfg = RunConfig::new("graph check").with_params(&params)?;
                cfg.out = out;
                cmd_graph_check(&cfg)
            }
            GraphAction::Export { params, svg, json, dot } => {
                let cfg = RunConfig::new("graph export").with_params(&params)?;
                cmd_graph_export(&cfg, svg.as_deref(), json.as_deref(), dot.as_deref())
            }
        },
        Command::Entropy { params, budget, out } => {
            let mut cfg = RunConfig::new("entropy").with_params(&params)?;
            cfg.out = out;
            cmd_entropy(&cfg, budget.unwrap_or(DEFAULT_CLOSURE_BUDGET))
        }
        Command::Rotation { params, max_iters, out } => {
            let mut cfg = RunConfig::new("rotation").with_params(&params)?.with_iters(max_iters)?;
            cfg.out = out;
            cmd_rotation(&cfg)
        }
        Command::Periods { lo, hi, out } => {
            let mut cfg = RunConfig::new("periods");
            let (lo, hi) = (cfg.rational("lo", &lo)?, cfg.rational("hi", &hi)?);
            cfg.out = out;
            cmd_periods(&cfg, &lo, &hi)
        }
        Command::Trapezoid { a, b, x, y, z, depth, out } => {
            let mut cfg = RunConfig::new("trapezoid");
            if depth == 0 {
                return Err(CliError::Usage("--depth must be positive".into()));
            }
            cfg.depth = depth;
            cfg.out = out;
            match (b, x, y, z) {
                (Some(b), None, None, None) => {
                    cfg.a = cfg.rational("a", &a)?;
                    cfg.b = cfg.rational("b", &b)?;
                    cmd_trapezoid_reduce(&cfg)
                }
                (None, Some(x), Some(y), Some(z)) => {
                    let t = TrapezoidParams::new(cfg.rational("x", &x)?, cfg.rational("y", &y)?, cfg.rational("z", &z)?);
                    cmd_trapezoid_map(&cfg, &t)
                }
                _ => Err(CliError::Usage("give either --b or all of --x --y --z".into())),
            }
        }
        Command::Critical { which, tol, out } => {
            let mut cfg = RunConfig::new("critical");
            cfg.tol = cfg.rational("tol", &tol)?;
            if !cfg.tol.is_positive() {
                return Err(CliError::Usage("--tol must be positive".into()));
            }
            cfg.out = out;
            let which = match which {
                Which::Alpha => Onset::Alpha,
                Which::Beta => Onset::Beta,
            };
            cmd_critical(&cfg, which)
        }
        Command::Verify { suite, report, seed } => {
            let mut cfg = RunConfig::new("verify");
            cfg.seed = seed;
            cfg.out = report;
            let suite = match suite {
                SuiteArg::Fast => Suite::Fast,
                SuiteArg::Full => Suite::Full,
                SuiteArg::Atlas => Suite::Atlas,
            };
            cmd_verify(&cfg, suite)
        }
        Command::Export { params, dir } => {
            let cfg = RunConfig::new("export").with_params(&params)?;
            cmd_export(&cfg, &dir)
        }
    }
}

pub fn cmd_orbit(cfg: &RunConfig, p: &Point) -> Result<Outcome, CliError> {
    let params = cfg.params();
    let rep = classify_orbit(&params, p, cfg.max_iters);
    let summary = match rep.period_len() {
        Some(n) => format!(
            "period {n} after {} iterates at {}",
            rep.preperiod,
            rep.canonical_cycle().iter().map(show).collect::<Vec<_>>().join(" -> ")
        ),
        None => format!("undecided after {} iterates", cfg.max_iters),
    };
    let body = match cfg.format {
        Format::Json => pretty(&json!({ "params": params, "summary": summary, "report": rep }))?,
        Format::Csv => export::orbit_csv(&params, &rep, cfg.max_iters.min(10_000)),
    };
    let code = if rep.is_decided() { EXIT_OK } else { EXIT_UNDECIDED };
    cfg.finish(code, body)
}

#[derive(Serialize)]
struct CycleRow {
    period: usize,
    count: usize,
    slope_product: crate::map_engine::SlopeProduct,
    cycle: Vec<Point>,
}

pub fn cmd_classify(cfg: &RunConfig, samples: usize) -> Result<Outcome, CliError> {
    let params = cfg.params();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pts = suite::sample_points(&mut rng, samples);
    let mut cycles: BTreeMap<Vec<Point>, CycleRow> = BTreeMap::new();
    let mut undecided = 0usize;
    for p in &pts {
        let rep = classify_orbit(&params, p, cfg.max_iters);
        let Some(period) = rep.period_len() else {
            undecided += 1;
            continue;
        };
        let key = rep.canonical_cycle();
        cycles
            .entry(key.clone())
            .or_insert_with(|| CycleRow { period, count: 0, slope_product: rep.slope_product.clone(), cycle: key })
            .count += 1;
    }
    let rows: Vec<&CycleRow> = cycles.values().collect();
    let body = pretty(&json!({
        "params": params,
        "samples": samples,
        "seed": cfg.seed,
        "undecided": undecided,
        "cycles": rows,
    }))?;
    cfg.finish(if undecided == 0 { EXIT_OK } else { EXIT_UNDECIDED }, body)
}

fn atlas_graph(cfg: &RunConfig) -> Result<(MapParams, &'static crate::graph_catalog::AtlasCase, PlanarGraph), CliError> {
    let norm = cfg.atlas_params()?;
    let case = atlas_lookup(&norm.b);
    let g = instantiate(case, &norm.b).map_err(|e| CliError::Unsupported(e.to_string()))?;
    Ok((norm, case, g))
}

pub fn cmd_graph_build(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.atlas_params()?;
    let (case, g) = instantiate_scaled(&cfg.params()).map_err(|e| CliError::Unsupported(e.to_string()))?;
    let body = pretty(&json!({
        "params": cfg.params(),
        "case": case.id,
        "validity": case.validity.describe(),
        "graph": g.to_json(),
    }))?;
    cfg.finish(EXIT_OK, body)
}

pub fn cmd_graph_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (norm, case, g) = atlas_graph(cfg)?;
    let inv = verify_invariance(&norm, &g);
    let acfg = ArrivalConfig::default();
    let n1 = arrival_time(&norm, Region::Q1, &g, &acfg).map_err(|e| CliError::Unsupported(e.to_string()))?;
    let n3 = arrival_time(&norm, Region::Q3, &g, &acfg).map_err(|e| CliError::Unsupported(e.to_string()))?;
    let (t1, t3) = arrival_table(&norm.b);
    let body = pretty(&json!({
        "b": format_rational(&norm.b),
        "case": case.id,
        "invariance": inv,
        "arrival": {
            "n1": n1.n,
            "n3": n3.n,
            "table": [t1, t3],
            "within_table": n1.n <= t1 && n3.n <= t3,
            "within_global_bound": n1.n.max(n3.n) <= 11,
        },
    }))?;
    cfg.finish(if inv.passed() { EXIT_OK } else { EXIT_INVARIANCE }, body)
}

fn cover_dot(norm: &MapParams, g: &PlanarGraph, title: &str) -> Result<String, CliError> {
    let (cover, _) =
        analyze_graph(norm, g, DEFAULT_CLOSURE_BUDGET).map_err(|e| CliError::Unsupported(e.to_string()))?;
    Ok(cover.matrix().to_dot(title))
}

pub fn cmd_graph_export(
    cfg: &RunConfig,
    svg: Option<&Path>,
    json_path: Option<&Path>,
    dot: Option<&Path>,
) -> Result<Outcome, CliError> {
    let (norm, case, g) = atlas_graph(cfg)?;
    let title = format!("{} at b = {}", case.id, format_rational(&norm.b));
    let mut written = Vec::new();
    if let Some(p) = svg {
        write_file(p, &export::graph_svg(&g, &title))?;
        written.push(p.display().to_string());
    }
    if let Some(p) = json_path {
        write_file(p, &pretty(&json!({ "case": case.id, "b": format_rational(&norm.b), "graph": g.to_json() }))?)?;
        written.push(p.display().to_string());
    }
    if let Some(p) = dot {
        write_file(p, &cover_dot(&norm, &g, &title)?)?;
        written.push(p.display().to_string());
    }
    if written.is_empty() {
        return Err(CliError::Usage("graph export needs at least one of --svg, --json, --dot".into()));
    }
    let stdout = written.iter().map(|w| format!("wrote {w}\n")).collect();
    Ok(Outcome { code: EXIT_OK, stdout, warnings: cfg.warnings.clone() })
}

fn reduction_error(e: ReductionError) -> CliError {
    match e {
        ReductionError::UnsupportedWindow(_) | ReductionError::Domain(_) | ReductionError::OffLine(_) => {
            CliError::Unsupported(e.to_string())
        }
        other => CliError::Usage(other.to_string()),
    }
}

pub fn cmd_entropy(cfg: &RunConfig, budget: usize) -> Result<Outcome, CliError> {
    cfg.atlas_params()?;
    let ce = entropy_of_case(&cfg.params(), budget).map_err(reduction_error)?;
    let body = pretty(&json!({ "params": cfg.params(), "value": ce.value(), "entropy": ce }))?;
    cfg.finish(EXIT_OK, body)
}

pub fn cmd_rotation(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (norm, case, g) = atlas_graph(cfg)?;
    // Non-circle graphs and budget exhaustion are both outside the method.
    let r = rotation_number(&norm, &g, cfg.max_iters).map_err(|e: CircleError| CliError::Unsupported(e.to_string()))?;
    let body = pretty(&json!({
        "b": format_rational(&norm.b),
        "case": case.id,
        "rotation": r.describe(),
        "result": r,
    }))?;
    cfg.finish(EXIT_OK, body)
}

pub fn cmd_periods(cfg: &RunConfig, lo: &Rational, hi: &Rational) -> Result<Outcome, CliError> {
    if lo > hi || lo.is_negative() {
        return Err(CliError::Usage("need 0 <= lo <= hi".into()));
    }
    let ps = period_set(lo, hi);
    let body = pretty(&json!({
        "interval": [format_rational(lo), format_rational(hi)],
        "threshold": ps.threshold,
        "threshold_without_floor": period_threshold_unfloored(lo, hi),
        "excluded": ps.excluded,
        "excluded_ranges": ps.ranges(),
        "period_one_by_rotation": ps.one_by_rotation,
    }))?;
    cfg.finish(EXIT_OK, body)
}

pub fn cmd_trapezoid_reduce(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let norm = cfg.atlas_params()?;
    let red = reduce_return_map(&norm).map_err(reduction_error)?;
    let t = make_trapezoid(&red.trapezoid).map_err(reduction_error)?;
    let lap = lap_entropy(&t, cfg.depth, crate::interval_reduction::onset::PREDICATE_BUDGET);
    let body = pretty(&json!({
        "reduction": red,
        "trapezoid_entropy": lap.value(),
        "graph_entropy": lap.value() / red.period as f64,
        "lap_entropy": lap,
    }))?;
    cfg.finish(EXIT_OK, body)
}

pub fn cmd_trapezoid_map(cfg: &RunConfig, t: &TrapezoidParams) -> Result<Outcome, CliError> {
    let f = make_trapezoid(t).map_err(reduction_error)?;
    let lap = lap_entropy(&f, cfg.depth, crate::interval_reduction::onset::PREDICATE_BUDGET);
    let body = pretty(&json!({ "params": t, "map": f, "entropy": lap.value(), "lap_entropy": lap }))?;
    cfg.finish(EXIT_OK, body)
}

pub fn cmd_critical(cfg: &RunConfig, which: Onset) -> Result<Outcome, CliError> {
    let br = bracket_onset(which, &cfg.tol).map_err(reduction_error)?;
    let body = pretty(&json!({
        "which": which.name(),
        "approx": [crate::exact_geometry::to_f64(&br.lo), crate::exact_geometry::to_f64(&br.hi)],
        "bracket": br,
    }))?;
    cfg.finish(if br.undecided { EXIT_UNDECIDED } else { EXIT_OK }, body)
}

/// Runs a suite; the report (if requested) goes to `cfg.out` as JSON and
/// one line per criterion goes to standard output.
pub fn cmd_verify(cfg: &RunConfig, which: Suite) -> Result<Outcome, CliError> {
    let report = run_suite(which, cfg.seed);
    let mut stdout: String = report.results.iter().map(|r| format!("{r}\n")).collect();
    let failed = report.results.iter().filter(|r| !r.passed).count();
    stdout.push_str(&format!("{} of {} criteria passed\n", report.results.len() - failed, report.results.len()));
    if let Some(path) = &cfg.out {
        write_file(path, &pretty(&report)?)?;
        stdout.push_str(&format!("wrote {}\n", path.display()));
    }
    Ok(Outcome { code: if report.passed { EXIT_OK } else { EXIT_USAGE }, stdout, warnings: cfg.warnings.clone() })
}

pub fn cmd_export(cfg: &RunConfig, dir: &Path) -> Result<Outcome, CliError> {
    let (norm, case, g) = atlas_graph(cfg)?;
    let title = format!("{} at b = {}", case.id, format_rational(&norm.b));
    let ce = entropy_of_case(&norm, DEFAULT_CLOSURE_BUDGET).map_err(reduction_error)?;
    let files = [
        ("graph.json", pretty(&json!({ "case": case.id, "b": format_rational(&norm.b), "graph": g.to_json() }))?),
        ("graph.svg", export::graph_svg(&g, &title)),
        ("cover.dot", cover_dot(&norm, &g, &title)?),
        ("entropy.json", pretty(&ce)?),
    ];
    let mut stdout = String::new();
    for (name, body) in files {
        let p = dir.join(name);
        write_file(&p, &body)?;
        stdout.push_str(&format!("wrote {}\n", p.display()));
    }
    Ok(Outcome { code: EXIT_OK, stdout, warnings: cfg.warnings.clone() })
}
