#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use muckenhoupt::cli::{run_with_threads, Cli, Outcome, RunConfig};
use muckenhoupt::space::{Edge, MetricMeasureSpace};
use muckenhoupt::subset::Subset;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Shortest-path metric of a random connected graph. Half of the spaces use
/// integer edge lengths, which produces many tied distances.
pub fn random_graph_space(rng: &mut ChaCha8Rng, n: usize) -> MetricMeasureSpace {
    let integer = rng.gen_bool(0.5);
    graph_space(rng, n, integer)
}

pub fn graph_space(rng: &mut ChaCha8Rng, n: usize, integer: bool) -> MetricMeasureSpace {
    let len = |rng: &mut ChaCha8Rng| if integer { rng.gen_range(1..=3) as f64 } else { rng.gen_range(0.5..2.0) };
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push(Edge { u, v, len: len(rng) });
    }
    for _ in 0..n / 2 {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            edges.push(Edge { u, v, len: len(rng) });
        }
    }
    let masses = LogNormal::new(0.0, 0.5).unwrap();
    let mu = (0..n).map(|_| masses.sample(rng)).collect();
    MetricMeasureSpace::from_graph(n, edges, mu).unwrap()
}

pub fn log_normal_weight(rng: &mut ChaCha8Rng, n: usize, sigma: f64) -> Vec<f64> {
    let d = LogNormal::new(0.0, sigma).unwrap();
    (0..n).map(|_| d.sample(rng)).collect()
}

/// Nonempty random subset; each point kept with probability `keep`.
pub fn random_subset(rng: &mut ChaCha8Rng, n: usize, keep: f64) -> Subset {
    let mut ids: Vec<usize> = (0..n).filter(|_| rng.gen_bool(keep)).collect();
    if ids.is_empty() {
        ids.push(rng.gen_range(0..n));
    }
    Subset::new(n, ids).unwrap()
}

/// Every distinct ball `{y : d(c, y) ≤ level}` for every center and level.
pub fn naive_balls(space: &MetricMeasureSpace) -> Vec<Vec<usize>> {
    let n = space.len();
    let mut out = Vec::new();
    for c in 0..n {
        let mut levels: Vec<f64> = (0..n).map(|y| space.dist(c, y)).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        for l in levels {
            out.push((0..n).filter(|&y| space.dist(c, y) <= l).collect());
        }
    }
    out
}

fn mass(space: &MetricMeasureSpace, b: &[usize]) -> f64 {
    b.iter().map(|&y| space.mu()[y]).sum()
}

/// Ball functional of the induced characteristic; `None` when skipped.
pub fn naive_functional(space: &MetricMeasureSpace, b: &[usize], e: Option<&Subset>, w: &[f64], p: f64) -> Option<f64> {
    let mu = space.mu();
    let mb = mass(space, b);
    let inside: Vec<usize> = b.iter().copied().filter(|&y| e.is_none_or(|e| e.contains(y))).collect();
    if p == 1.0 {
        if inside.is_empty() {
            return None;
        }
        let avg = inside.iter().map(|&y| w[y] * mu[y]).sum::<f64>() / mb;
        let min = inside.iter().map(|&y| w[y]).fold(f64::INFINITY, f64::min);
        return Some(avg / min);
    }
    if inside.is_empty() {
        return Some(0.0);
    }
    let a = inside.iter().map(|&y| w[y] * mu[y]).sum::<f64>() / mb;
    let b = inside.iter().map(|&y| w[y].powf(-1.0 / (p - 1.0)) * mu[y]).sum::<f64>() / mb;
    Some(a * b.powf(p - 1.0))
}

/// Supremum of the functional over all balls, or over balls inside `within`.
pub fn naive_characteristic(
    space: &MetricMeasureSpace,
    e: Option<&Subset>,
    w: &[f64],
    p: f64,
    within: Option<&Subset>,
) -> f64 {
    naive_balls(space)
        .iter()
        .filter(|b| within.is_none_or(|d| b.iter().all(|&y| d.contains(y))))
        .filter_map(|b| naive_functional(space, b, e, w, p))
        .fold(0.0, f64::max)
}

pub fn naive_maximal(space: &MetricMeasureSpace, f: &[f64], e: Option<&Subset>) -> Vec<f64> {
    let balls = naive_balls(space);
    let mu = space.mu();
    (0..space.len())
        .map(|x| {
            balls
                .iter()
                .filter(|b| b.contains(&x))
                .map(|b| {
                    let s: f64 = b.iter().filter(|&&y| e.is_none_or(|e| e.contains(y))).map(|&y| f[y].abs() * mu[y]).sum();
                    s / mass(space, b)
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Command lines whose reports are stored under `tests/golden/<name>`.
pub const GOLDEN_CASES: &[(&str, &str)] = &[
    ("space_build", "space build --dim 2 --side 4 --spacing 0.5"),
    ("space_validate", "space validate --space tests/fixtures/ring6.json"),
    ("ball_doubling", "ball doubling --space tests/fixtures/s3.json"),
    ("maximal_s3", "maximal --space tests/fixtures/s3.json --weight tests/fixtures/s3_indicator_a.json --subset 0"),
    ("maximal_ring", "maximal --space tests/fixtures/ring6.json --weight tests/fixtures/ring6_w.json"),
    ("characteristic_s2", "characteristic --space tests/fixtures/s2.json --weight tests/fixtures/s2_w14.json --p 2"),
    ("characteristic_s2_a1", "characteristic --space tests/fixtures/s2.json --weight tests/fixtures/s2_w14.json --p 1"),
    ("characteristic_domain", "characteristic --space tests/fixtures/s3.json --weight tests/fixtures/s3_w14_ab.json --domain 0,1 --p 2"),
    ("characteristic_eps", "characteristic --space tests/fixtures/ring6.json --weight tests/fixtures/ring6_w.json --p 2 --eps-grid 0,0.5,1 --budget 10"),
    ("rhi_s2", "rhi --space tests/fixtures/s2.json --weight tests/fixtures/s2_w14.json --delta 1"),
    ("factorize_line", "factorize --space tests/fixtures/line17.json --weight tests/fixtures/line17_sqrt.json --p 3"),
    ("factorize_line_small_p", "factorize --space tests/fixtures/line17.json --weight tests/fixtures/line17_sqrt.json --p 1.5"),
    ("extend_unit", "extend --space tests/fixtures/s3.json --weight tests/fixtures/s3_ones.json --subset 0,1 --p 2 --eps 0.5"),
    ("extend_s3", "extend --space tests/fixtures/s3.json --weight tests/fixtures/s3_w4_a.json --p 2 --eps 1"),
    ("extend_line", "extend --space tests/fixtures/line17.json --weight tests/fixtures/line17_sqrt.json --p 2 --eps 0.5"),
    ("condition_s2", "condition --space tests/fixtures/s2.json --weight tests/fixtures/s2_w14.json --subset 0,1 --p 2 --eps-grid 0,1 --budget 2"),
    ("restrict_s3", "restrict --space tests/fixtures/s3.json --weight tests/fixtures/s3_cr.json --subset 0,1 --p 2 --eps 0"),
    ("whitney_line", "whitney --space tests/fixtures/line11.json --domain 1..10"),
    ("whitney_square", "whitney --space tests/fixtures/square24.json --domain tests/fixtures/square24_interior.json"),
    ("chains_square", "chains --space tests/fixtures/square24.json --domain tests/fixtures/square24_interior.json --weight tests/fixtures/square24_delta.json --pairs 40 --seed 7"),
    ("qh_line", "qh --space tests/fixtures/line11.json --domain 1..10 --x 2 --y 5"),
    ("study_extension", "study refine --scenario extension --sides 16,32,64"),
    ("study_condition", "study refine --scenario condition --sides 16,32 --eps-grid 0,0.5"),
    ("study_whitney", "study refine --scenario whitney --sides 12,24 --seed 3"),
    ("study_chains", "study refine --scenario chains --sides 24,32 --pairs 50 --seed 3"),
];

pub fn parse_case(args: &str) -> RunConfig {
    let cli = Cli::try_parse_from(std::iter::once("muck").chain(args.split_whitespace())).expect("golden command parses");
    RunConfig::from_command(cli.command)
}

pub fn run_case(args: &str, threads: usize) -> Outcome {
    run_with_threads(&parse_case(args), Some(threads)).expect("golden command succeeds")
}

pub fn golden_dir(name: &str) -> PathBuf {
    Path::new("tests/golden").join(name)
}

/// Contents of every file a case writes, except the timing metadata.
pub fn outcome_files(outcome: &Outcome) -> Vec<(String, String)> {
    let mut files = vec![("report.json".to_string(), outcome.report_text())];
    files.extend(outcome.files.iter().cloned());
    files
}

/// Compares an outcome with the stored golden files, or rewrites them when
/// `MUCK_BLESS` is set. Returns the names of files that differ.
pub fn check_golden(name: &str, outcome: &Outcome) -> Vec<String> {
    let dir = golden_dir(name);
    let files = outcome_files(outcome);
    if std::env::var_os("MUCK_BLESS").is_some() {
        fs::create_dir_all(&dir).unwrap();
        for (f, text) in &files {
            fs::write(dir.join(f), text).unwrap();
        }
        return Vec::new();
    }
    files
        .iter()
        .filter(|(f, text)| fs::read_to_string(dir.join(f)).map_or(true, |g| &g != text))
        .map(|(f, _)| f.clone())
        .collect()
}
