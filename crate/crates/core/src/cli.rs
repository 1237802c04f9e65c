//! The `muck` command line: argument parsing, command dispatch and report
//! files.
//!
//! Every command produces a deterministic `report.json`. Wall-clock and host
//! details go to a separate `meta.json`, so reports can be compared byte for
//! byte between runs.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::balls::doubling_constant;
use crate::error::{Error, Result};
use crate::extension::{check_extension_condition, restrict_weight_report, wolff_extend, GFactor};
use crate::factorization::{jones_factorize, FactorizationResult, DEFAULT_TOL};
use crate::io::{function_to_string, load_function, load_space, load_subset, space_to_string, FunctionData};
use crate::maximal::maximal_fn;
use crate::space::{build_grid_space, MetricMeasureSpace};
use crate::study::{chain_study, condition_study, extension_study, whitney_study, StudyTable};
use crate::subset::Subset;
use crate::weights::{
    ap_characteristic, ap_domain_characteristic, ap_tilde_characteristic, reverse_holder_constant,
    self_improve_epsilon, Scope,
};
use crate::whitney::{
    chain_comparability, chain_weight_fit, check_cover_invariants, whitney_cover, Domain, PairSelection, QhGraph,
};

#[derive(Parser, Debug)]
#[command(name = "muck", version, about = "Muckenhoupt weights on finite metric measure spaces")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// Build a grid space or validate a space file.
    Space {
        #[arg(value_enum)]
        action: SpaceAction,
        #[command(flatten)]
        opts: Opts,
    },
    /// Ball statistics of a space.
    Ball {
        #[arg(value_enum)]
        action: BallAction,
        #[command(flatten)]
        opts: Opts,
    },
    /// Maximal function, optionally localized to a subset.
    Maximal(Opts),
    /// A_p characteristic on X, induced on a subset, or inside a domain.
    Characteristic(Opts),
    /// Reverse Hölder constant.
    Rhi(Opts),
    /// Jones factorization on a subset.
    Factorize(Opts),
    /// Extend a weight from a subset to the whole space.
    Extend(Opts),
    /// Induced characteristics of powers of a weight.
    Condition(Opts),
    /// Compare induced and global characteristics of an extended weight.
    Restrict(Opts),
    /// Whitney cover of a domain.
    Whitney(Opts),
    /// Chain lengths against quasihyperbolic distance.
    Chains(Opts),
    /// Quasihyperbolic distance between two points of a domain.
    Qh(Opts),
    /// Refinement studies.
    Study {
        #[arg(value_enum)]
        action: StudyAction,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceAction {
    Build,
    Validate,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BallAction {
    Doubling,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyAction {
    Refine,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Extension,
    Condition,
    Whitney,
    Chains,
}

/// Flags shared by every command; each command reads the ones it needs.
#[derive(Args, Clone, Debug, Default, Serialize)]
pub struct Opts {
    /// Space file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<PathBuf>,
    /// Function or weight file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<PathBuf>,
    /// Subset E: a subset file, a list `0,3,7` or a range `4..9`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset: Option<String>,
    /// Domain D, in the same forms as `--subset`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_grid: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sides: Option<Vec<usize>>,
    /// Reverse Hölder exponent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Grid dimension for `space build`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Grid side for `space build`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<usize>,
    /// Grid spacing for `space build` (default 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    /// Radius cap of the maximal function.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_cap: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<usize>,
    /// Sampled pair count for chain statistics.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    /// Power of the scenario weight.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
}

/// A parsed invocation: the command name and its flags.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(flatten)]
    pub opts: Opts,
}

impl RunConfig {
    pub fn new(command: &str, opts: Opts) -> Self {
        RunConfig { command: command.into(), opts }
    }

    pub fn from_command(command: Command) -> Self {
        match command {
            Command::Space { action: SpaceAction::Build, opts } => RunConfig::new("space build", opts),
            Command::Space { action: SpaceAction::Validate, opts } => RunConfig::new("space validate", opts),
            Command::Ball { action: BallAction::Doubling, opts } => RunConfig::new("ball doubling", opts),
            Command::Maximal(o) => RunConfig::new("maximal", o),
            Command::Characteristic(o) => RunConfig::new("characteristic", o),
            Command::Rhi(o) => RunConfig::new("rhi", o),
            Command::Factorize(o) => RunConfig::new("factorize", o),
            Command::Extend(o) => RunConfig::new("extend", o),
            Command::Condition(o) => RunConfig::new("condition", o),
            Command::Restrict(o) => RunConfig::new("restrict", o),
            Command::Whitney(o) => RunConfig::new("whitney", o),
            Command::Chains(o) => RunConfig::new("chains", o),
            Command::Qh(o) => RunConfig::new("qh", o),
            Command::Study { action: StudyAction::Refine, opts } => RunConfig::new("study refine", opts),
        }
    }
}

/// Everything a command produces, before anything touches the disk.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    /// Deterministic report document.
    pub report: Value,
    /// Extra files `(name, contents)` for the output directory.
    pub files: Vec<(String, String)>,
}

impl Outcome {
    pub fn report_text(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("json values serialize") + "\n"
    }
}

fn missing(flag: &str) -> Error {
    Error::InvalidArgument(format!("missing --{flag}"))
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone().ok_or_else(|| missing(flag))
}

fn load_weight(o: &Opts, n: usize) -> Result<FunctionData> {
    load_function(need(&o.weight, "weight")?, n)
}

/// `path`, `a,b,c` or `lo..hi` (half open).
pub fn parse_subset_arg(arg: &str, n: usize) -> Result<Subset> {
    let path = Path::new(arg);
    if path.is_file() {
        return load_subset(path, n);
    }
    let bad = || Error::InvalidArgument(format!("cannot read subset {arg:?}"));
    if let Some((lo, hi)) = arg.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        return Subset::new(n, (lo..hi).collect());
    }
    let ids = arg
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    Subset::new(n, ids)
}

/// `--subset` if given, otherwise the support recorded in the weight file.
fn subset_or_support(o: &Opts, n: usize, f: &FunctionData) -> Result<Subset> {
    match (&o.subset, &f.support) {
        (Some(s), _) => parse_subset_arg(s, n),
        (None, Some(s)) => Ok(s.clone()),
        (None, None) => Err(missing("subset")),
    }
}

fn domain_of(o: &Opts, space: &MetricMeasureSpace) -> Result<Domain> {
    Domain::new(space, parse_subset_arg(&need(&o.domain, "domain")?, space.len())?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn g_summary(g: &GFactor) -> Value {
    json!({ "a1_constant": g.a1_constant, "min_on_e": g.min_on_e, "max_on_e": g.max_on_e })
}

fn factorization_summary(f: &FactorizationResult) -> Value {
    json!({
        "branch": f.branch,
        "p": f.p,
        "c": f.c,
        "operator_c": f.operator_c,
        "k_max": f.k_max,
        "doublings": f.doublings,
        "residual": f.residual,
        "bounds": f.bounds,
        "trace": f.trace,
    })
}

fn function_file(name: &str, values: &[f64], support: Option<&Subset>) -> Result<(String, String)> {
    Ok((name.to_string(), function_to_string(values, support)? + "\n"))
}

fn table_csv(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<String> {
    StudyTable { scenario: String::new(), seed: None, columns: header.iter().map(|s| s.to_string()).collect(), rows: rows.collect() }
        .to_csv()
}

/// Runs one command without touching the output directory.
pub fn run_command(cfg: &RunConfig) -> Result<Outcome> {
    let o = &cfg.opts;
    let mut files = Vec::new();
    let result = match cfg.command.as_str() {
        "space build" => {
            let side = need(&o.side, "side")?;
            let space = build_grid_space(o.dim.unwrap_or(1), side, o.spacing.unwrap_or(1.0))?;
            files.push(("space.json".to_string(), space_to_string(&space)? + "\n"));
            json!({ "n": space.len(), "meta": space.meta(), "file": "space.json" })
        }
        "space validate" => {
            let space = load_space(need(&o.space, "space")?)?;
            space.validate()?;
            json!({ "valid": true, "n": space.len(), "resolution": space.resolution(), "total_mass": space.total_mass() })
        }
        "ball doubling" => {
            let space = load_space(need(&o.space, "space")?)?;
            let balls = space.balls()?;
            let mut r = to_value(&doubling_constant(&space)?);
            r["ball_count"] = json!(balls.ball_count());
            r
        }
        "maximal" => {
            let space = load_space(need(&o.space, "space")?)?;
            let f = load_weight(o, space.len())?;
            let e = o.subset.as_deref().map(|s| parse_subset_arg(s, space.len())).transpose()?;
            let m = maximal_fn(&space, &f.values, e.as_ref(), o.radius_cap)?;
            files.push(function_file("maximal.json", &m, e.as_ref())?);
            let on = |i: &usize| e.as_ref().is_none_or(|e| e.contains(*i));
            let vals: Vec<f64> = (0..space.len()).filter(on).map(|i| m[i]).collect();
            json!({
                "subset_size": vals.len(),
                "min": vals.iter().copied().fold(f64::INFINITY, f64::min),
                "max": vals.iter().copied().fold(0.0, f64::max),
                "file": "maximal.json",
            })
        }
        "characteristic" => {
            let space = load_space(need(&o.space, "space")?)?;
            let n = space.len();
            let w = load_weight(o, n)?;
            let p = need(&o.p, "p")?;
            if let Some(grid) = &o.eps_grid {
                let r = self_improve_epsilon(&space, &w.values, p, grid, o.budget.unwrap_or(f64::INFINITY))?;
                files.push(("eps_table.csv".into(), table_csv(&["eps", "characteristic"], r.table.iter().map(|t| vec![t.eps, t.characteristic]))?));
                json!({ "self_improvement": r, "characteristic": ap_characteristic(&space, &w.values, p)? })
            } else if let Some(d) = &o.domain {
                to_value(&ap_domain_characteristic(&space, &parse_subset_arg(d, n)?, &w.values, p)?)
            } else if o.subset.is_some() || w.support.is_some() {
                to_value(&ap_tilde_characteristic(&space, &subset_or_support(o, n, &w)?, &w.values, p)?)
            } else {
                to_value(&ap_characteristic(&space, &w.values, p)?)
            }
        }
        "rhi" => {
            let space = load_space(need(&o.space, "space")?)?;
            let w = load_weight(o, space.len())?;
            let delta = need(&o.delta, "delta")?;
            match &o.domain {
                Some(d) => {
                    let d = parse_subset_arg(d, space.len())?;
                    to_value(&reverse_holder_constant(&space, &w.values, delta, Scope::Inside(&d))?)
                }
                None => to_value(&reverse_holder_constant(&space, &w.values, delta, Scope::All)?),
            }
        }
        "factorize" => {
            let space = load_space(need(&o.space, "space")?)?;
            let w = load_weight(o, space.len())?;
            let e = subset_or_support(o, space.len(), &w)?;
            let f = jones_factorize(&space, &e, &w.values, need(&o.p, "p")?, o.tol.unwrap_or(DEFAULT_TOL))?;
            files.push(function_file("v1.json", &f.v1, Some(&e))?);
            files.push(function_file("v2.json", &f.v2, Some(&e))?);
            files.push(function_file("eta.json", &f.eta, Some(&e))?);
            let mut r = factorization_summary(&f);
            r["files"] = json!({ "v1": "v1.json", "v2": "v2.json", "eta": "eta.json" });
            r
        }
        "extend" => {
            let space = load_space(need(&o.space, "space")?)?;
            let w = load_weight(o, space.len())?;
            let e = subset_or_support(o, space.len(), &w)?;
            let r = wolff_extend(&space, &e, &w.values, need(&o.p, "p")?, need(&o.eps, "eps")?, o.tol.unwrap_or(DEFAULT_TOL))?;
            files.push(function_file("W.json", &r.w_ext, None)?);
            files.push(function_file("v1.json", &r.factorization.v1, Some(&e))?);
            files.push(function_file("v2.json", &r.factorization.v2, Some(&e))?);
            files.push(function_file("g.json", &r.g, None)?);
            json!({
                "agreement_error": r.agreement_error,
                "ap_constant_W": r.ap_constant_w,
                "p": r.p,
                "eps": r.eps,
                "delta": r.delta,
                "g1": g_summary(&r.g1),
                "g2": r.g2.as_ref().map(g_summary),
                "factorization": factorization_summary(&r.factorization),
                "files": { "W": "W.json", "v1": "v1.json", "v2": "v2.json", "g": "g.json" },
            })
        }
        "condition" => {
            let space = load_space(need(&o.space, "space")?)?;
            let w = load_weight(o, space.len())?;
            let e = subset_or_support(o, space.len(), &w)?;
            let grid = need(&o.eps_grid, "eps-grid")?;
            let r = check_extension_condition(&space, &e, &w.values, need(&o.p, "p")?, &grid, o.budget.unwrap_or(f64::INFINITY))?;
            files.push(("eps_table.csv".into(), table_csv(&["eps", "characteristic"], r.table.iter().map(|t| vec![t.eps, t.characteristic]))?));
            to_value(&r)
        }
        "restrict" => {
            let space = load_space(need(&o.space, "space")?)?;
            let w = load_weight(o, space.len())?;
            let e = parse_subset_arg(&need(&o.subset, "subset")?, space.len())?;
            to_value(&restrict_weight_report(&space, &e, &w.values, need(&o.p, "p")?, o.eps.unwrap_or(0.0))?)
        }
        "whitney" => {
            let space = load_space(need(&o.space, "space")?)?;
            let domain = domain_of(o, &space)?;
            let cover = whitney_cover(&space, &domain)?;
            let summary = check_cover_invariants(&space, &domain, &cover)?;
            let mut r = to_value(&cover);
            r["invariants"] = to_value(&summary);
            r
        }
        "chains" => {
            let space = load_space(need(&o.space, "space")?)?;
            let domain = domain_of(o, &space)?;
            let cover = whitney_cover(&space, &domain)?;
            let qh = QhGraph::new(&space, &domain)?;
            let seed = o.seed.unwrap_or(0);
            let selection = match o.pairs {
                Some(pairs) => PairSelection::Sample { pairs, seed },
                None => PairSelection::All,
            };
            let mut r = to_value(&chain_comparability(&space, &cover, &qh, selection)?);
            if o.weight.is_some() {
                let w = load_weight(o, space.len())?;
                r["weight_fit"] = to_value(&chain_weight_fit(&space, &cover, &w.values, o.pairs.unwrap_or(200), seed)?);
            }
            r
        }
        "qh" => {
            let space = load_space(need(&o.space, "space")?)?;
            let domain = domain_of(o, &space)?;
            let (x, y) = (need(&o.x, "x")?, need(&o.y, "y")?);
            json!({ "x": x, "y": y, "qh": QhGraph::new(&space, &domain)?.distance(x, y)? })
        }
        "study refine" => {
            let table = run_study(o)?;
            files.push(("data.csv".into(), table.to_csv()?));
            to_value(&table)
        }
        other => return Err(Error::InvalidArgument(format!("unknown command {other:?}"))),
    };
    let report = json!({ "command": cfg.command, "config": cfg, "seed": o.seed, "result": result });
    Ok(Outcome { report, files })
}

fn run_study(o: &Opts) -> Result<StudyTable> {
    let scenario = need(&o.scenario, "scenario")?;
    let seed = o.seed.unwrap_or(1);
    match scenario {
        Scenario::Extension => extension_study(
            &o.sides.clone().unwrap_or(vec![64, 128, 256]),
            o.exponent.unwrap_or(0.5),
            o.p.unwrap_or(2.0),
            o.eps.unwrap_or(0.5),
            o.tol.unwrap_or(DEFAULT_TOL),
        ),
        Scenario::Condition => condition_study(
            &o.sides.clone().unwrap_or(vec![64, 128, 256]),
            o.exponent.unwrap_or(0.5),
            o.p.unwrap_or(2.0),
            &o.eps_grid.clone().unwrap_or(vec![0.0, 0.25, 0.5, 0.75, 1.0]),
        ),
        Scenario::Whitney => whitney_study(&o.sides.clone().unwrap_or(vec![32, 64, 128]), seed),
        Scenario::Chains => chain_study(
            &o.sides.clone().unwrap_or(vec![32, 64, 128]),
            o.pairs.unwrap_or(200),
            seed,
            o.exponent.unwrap_or(0.3),
        ),
    }
}

/// Runs a command on a pool of `threads` workers (all cores when `None`).
pub fn run_with_threads(cfg: &RunConfig, threads: Option<usize>) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    pool.install(|| run_command(cfg))
}

fn host_name() -> String {
    std::env::var("HOSTNAME")
        .ok()
        .or_else(|| fs::read_to_string("/etc/hostname").ok())
        .map(|s| s.trim().to_string())
        .unwrap_or_default()
}

/// Writes `report.json`, `meta.json` and any extra files into `dir`.
pub fn write_outcome(dir: &Path, outcome: &Outcome, meta: &Value) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join("report.json"), outcome.report_text()).map_err(io)?;
    for (name, text) in &outcome.files {
        fs::write(dir.join(name), text).map_err(io)?;
    }
    crate::io::write_json(dir.join("meta.json"), meta)
}

/// Machine-readable error document.
pub fn error_report(e: &Error) -> Value {
    json!({ "error": { "kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() } })
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let threads = cli.threads;
    let cfg = RunConfig::from_command(cli.command);
    let out = cfg.opts.out.clone();
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let outcome = run_with_threads(&cfg, threads);
    let meta = json!({
        "tool": "muck",
        "version": env!("CARGO_PKG_VERSION"),
        "started_unix": started,
        "elapsed_seconds": clock.elapsed().as_secs_f64(),
        "threads": threads.unwrap_or_else(rayon::current_num_threads),
        "host": host_name(),
    });
    let written = outcome.and_then(|oc| {
        print!("{}", oc.report_text());
        match &out {
            Some(dir) => write_outcome(dir, &oc, &meta),
            None => Ok(()),
        }
    });
    match written {
        Ok(()) => 0,
        Err(e) => {
            let doc = error_report(&e);
            eprintln!("{}", serde_json::to_string_pretty(&doc).expect("json values serialize"));
            if let Some(dir) = &out {
                if fs::create_dir_all(dir).is_ok() {
                    let _ = crate::io::write_json(dir.join("error.json"), &doc);
                }
            }
            e.exit_code()
        }
    }
}
