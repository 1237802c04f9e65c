//! JSON persistence for spaces, functions, subsets and reports.
//!
//! Every file carries `"version": 1`. Floats are written in shortest
//! round-trip form, so save followed by load is bit-exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{build_grid_space, with_masses, Edge, Metric, MetricMeasureSpace, MetricSource};
use crate::subset::Subset;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct SpaceFile {
    version: u64,
    n: usize,
    metric: MetricSpec,
    mu: Vec<f64>,
    #[serde(default)]
    meta: String,
    /// Geodesic-surrogate graph of a matrix space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<(usize, usize, f64)>>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum MetricSpec {
    Matrix { data: Vec<Vec<f64>> },
    Graph { edges: Vec<(usize, usize, f64)> },
    Grid { dim: usize, side: usize, spacing: f64 },
}

#[derive(Deserialize)]
struct Versioned {
    version: u64,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse { location: format!("line {} column {}", e.line(), e.column()), message: e.to_string() }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Parses a versioned document, checking the version before the body.
fn parse_versioned<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let v: Versioned = serde_json::from_str(text).map_err(parse_error)?;
    if v.version != FORMAT_VERSION {
        return Err(Error::VersionMismatch { found: v.version, expected: FORMAT_VERSION });
    }
    serde_json::from_str(text).map_err(parse_error)
}

fn triples(edges: &[Edge]) -> Vec<(usize, usize, f64)> {
    edges.iter().map(|e| (e.u, e.v, e.len)).collect()
}

fn edges_of(t: Vec<(usize, usize, f64)>) -> Vec<Edge> {
    t.into_iter().map(|(u, v, len)| Edge { u, v, len }).collect()
}

pub fn space_to_string(space: &MetricMeasureSpace) -> Result<String> {
    let (metric, edges) = match (space.source(), space.metric()) {
        (MetricSource::Grid, Metric::Lattice(l)) => {
            (MetricSpec::Grid { dim: l.dim, side: l.side, spacing: l.spacing }, None)
        }
        (MetricSource::Graph, _) => {
            let edges = space.edges().ok_or_else(|| Error::InvalidArgument("graph space without edges".into()))?;
            (MetricSpec::Graph { edges: triples(edges) }, None)
        }
        _ => (MetricSpec::Matrix { data: space.distance_rows() }, space.edges().map(triples)),
    };
    let file = SpaceFile { version: FORMAT_VERSION, n: space.len(), metric, mu: space.mu().to_vec(), meta: space.meta().into(), edges };
    serde_json::to_string(&file).map_err(|e| Error::Io(e.to_string()))
}

pub fn parse_space(text: &str) -> Result<MetricMeasureSpace> {
    let f: SpaceFile = parse_versioned(text)?;
    if f.mu.len() != f.n {
        return Err(Error::Parse { location: "field mu".into(), message: format!("expected {} masses, got {}", f.n, f.mu.len()) });
    }
    let space = match f.metric {
        MetricSpec::Matrix { data } => {
            let s = MetricMeasureSpace::from_matrix(data, f.mu)?;
            match f.edges {
                Some(e) => s.with_edges(edges_of(e)),
                None => s,
            }
        }
        MetricSpec::Graph { edges } => MetricMeasureSpace::from_graph(f.n, edges_of(edges), f.mu)?,
        MetricSpec::Grid { dim, side, spacing } => {
            let g = build_grid_space(dim, side, spacing)?;
            if g.len() != f.n {
                return Err(Error::Parse { location: "field n".into(), message: format!("grid has {} points, n = {}", g.len(), f.n) });
            }
            if g.mu() == f.mu.as_slice() {
                g
            } else {
                with_masses(&g, f.mu)?
            }
        }
    };
    Ok(space.with_meta(f.meta))
}

pub fn save_space(path: impl AsRef<Path>, space: &MetricMeasureSpace) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, space_to_string(space)? + "\n").map_err(|e| io_error(path, e))
}

pub fn load_space(path: impl AsRef<Path>) -> Result<MetricMeasureSpace> {
    let path = path.as_ref();
    parse_space(&fs::read_to_string(path).map_err(|e| io_error(path, e))?)
}

#[derive(Serialize, Deserialize)]
struct FunctionFile {
    version: u64,
    domain: DomainTag,
    #[serde(rename = "E", default, skip_serializing_if = "Option::is_none")]
    e: Option<Vec<usize>>,
    values: Vec<f64>,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
enum DomainTag {
    X,
    E,
}

/// A function read from disk: full-length values over `X` (0 outside the
/// support) and the support when the file was restricted to a subset.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionData {
    pub values: Vec<f64>,
    pub support: Option<Subset>,
}

/// With `support`, only the values on the support are written, in id order.
pub fn function_to_string(values: &[f64], support: Option<&Subset>) -> Result<String> {
    let file = match support {
        None => FunctionFile { version: FORMAT_VERSION, domain: DomainTag::X, e: None, values: values.to_vec() },
        Some(s) => {
            if s.universe() != values.len() {
                return Err(Error::InvalidArgument("support lives in a different space".into()));
            }
            FunctionFile { version: FORMAT_VERSION, domain: DomainTag::E, e: Some(s.ids().to_vec()), values: s.restrict(values) }
        }
    };
    serde_json::to_string(&file).map_err(|e| Error::Io(e.to_string()))
}

pub fn parse_function(text: &str, n: usize) -> Result<FunctionData> {
    let f: FunctionFile = parse_versioned(text)?;
    match (f.domain, f.e) {
        (DomainTag::X, _) => {
            if f.values.len() != n {
                return Err(Error::Parse { location: "field values".into(), message: format!("expected {n} values, got {}", f.values.len()) });
            }
            Ok(FunctionData { values: f.values, support: None })
        }
        (DomainTag::E, None) => Err(Error::Parse { location: "field E".into(), message: "domain \"E\" requires an E list".into() }),
        (DomainTag::E, Some(ids)) => {
            if ids.len() != f.values.len() || ids.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse {
                    location: "field E".into(),
                    message: "E must be strictly increasing and match values in length".into(),
                });
            }
            let s = Subset::new(n, ids)?;
            Ok(FunctionData { values: s.extend(&f.values, 0.0)?, support: Some(s) })
        }
    }
}

pub fn save_function(path: impl AsRef<Path>, values: &[f64], support: Option<&Subset>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, function_to_string(values, support)? + "\n").map_err(|e| io_error(path, e))
}

pub fn load_function(path: impl AsRef<Path>, n: usize) -> Result<FunctionData> {
    let path = path.as_ref();
    parse_function(&fs::read_to_string(path).map_err(|e| io_error(path, e))?, n)
}

#[derive(Serialize, Deserialize)]
struct SubsetFile {
    version: u64,
    ids: Vec<usize>,
}

pub fn subset_to_string(s: &Subset) -> String {
    serde_json::to_string(&SubsetFile { version: FORMAT_VERSION, ids: s.ids().to_vec() }).expect("plain data")
}

pub fn parse_subset(text: &str, n: usize) -> Result<Subset> {
    let f: SubsetFile = parse_versioned(text)?;
    Subset::new(n, f.ids)
}

pub fn save_subset(path: impl AsRef<Path>, s: &Subset) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, subset_to_string(s) + "\n").map_err(|e| io_error(path, e))
}

pub fn load_subset(path: impl AsRef<Path>, n: usize) -> Result<Subset> {
    let path = path.as_ref();
    parse_subset(&fs::read_to_string(path).map_err(|e| io_error(path, e))?, n)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| io_error(path, e))
}
