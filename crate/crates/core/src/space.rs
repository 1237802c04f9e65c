//! Finite metric measure spaces.
//!
//! A space is a point set `0..n` with a metric, strictly positive point
//! masses and an optional edge graph used as a geodesic surrogate. Two
//! metric storages exist: a dense `n × n` matrix, and an implicit Euclidean
//! lattice whose distances are computed from integer coordinates on demand.
//! The lattice form lets grid spaces grow past what a dense matrix allows.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use petgraph::graph::{NodeIndex, UnGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balls::CanonicalBalls;
use crate::error::{Error, Result};

/// Relative slack for comparisons that are exact in real arithmetic.
pub const REL_TOL: f64 = 1e-12;

/// Largest point count for which a dense distance matrix is materialized.
pub const DENSE_CAP: usize = 4096;

/// Default cap on the number of lattice cells produced by grid builders.
pub const GRID_CAP: usize = 1 << 22;

/// Index of a point; dense in `0..n` and stable for the lifetime of a space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl PointId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for PointId {
    fn from(i: usize) -> Self {
        PointId(i)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub len: f64,
}

/// Regular lattice `{0..side}^dim` scaled by `spacing`, with Euclidean distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub dim: usize,
    pub side: usize,
    pub spacing: f64,
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.side == 0
    }

    /// Integer coordinates of a cell; axis 0 varies fastest.
    pub fn cell(&self, mut i: usize) -> [i64; 3] {
        let mut c = [0i64; 3];
        for slot in c.iter_mut().take(self.dim) {
            *slot = (i % self.side) as i64;
            i /= self.side;
        }
        c
    }

    pub fn index(&self, c: [i64; 3]) -> Option<usize> {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for &ck in c.iter().take(self.dim) {
            if ck < 0 || ck >= self.side as i64 {
                return None;
            }
            idx += ck as usize * stride;
            stride *= self.side;
        }
        Some(idx)
    }

    fn dist_cells(&self, a: [i64; 3], b: [i64; 3]) -> f64 {
        let mut s = 0i64;
        for k in 0..self.dim {
            let d = a[k] - b[k];
            s += d * d;
        }
        (s as f64).sqrt() * self.spacing
    }
}

#[derive(Clone, Debug)]
pub enum Metric {
    Dense(Vec<f64>),
    Lattice(Lattice),
}

/// How the metric was specified; determines the file representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricSource {
    Matrix,
    Graph,
    Grid,
}

/// The ambient space `(X, d, μ)`.
#[derive(Debug)]
pub struct MetricMeasureSpace {
    n: usize,
    metric: Metric,
    source: MetricSource,
    mu: Vec<f64>,
    edges: Option<Vec<Edge>>,
    meta: String,
    balls: OnceLock<Arc<CanonicalBalls>>,
}

impl Clone for MetricMeasureSpace {
    fn clone(&self) -> Self {
        let balls = OnceLock::new();
        if let Some(b) = self.balls.get() {
            let _ = balls.set(Arc::clone(b));
        }
        MetricMeasureSpace {
            n: self.n,
            metric: self.metric.clone(),
            source: self.source,
            mu: self.mu.clone(),
            edges: self.edges.clone(),
            meta: self.meta.clone(),
            balls,
        }
    }
}

impl MetricMeasureSpace {
    /// Space from a row-major `n × n` distance matrix. Not validated.
    pub fn from_matrix(dist: Vec<Vec<f64>>, mu: Vec<f64>) -> Result<Self> {
        let n = mu.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "distance matrix must be {n} x {n}"
            )));
        }
        if n > DENSE_CAP {
            return Err(Error::SizeOverflow { requested: n, cap: DENSE_CAP });
        }
        Ok(MetricMeasureSpace {
            n,
            metric: Metric::Dense(dist.into_iter().flatten().collect()),
            source: MetricSource::Matrix,
            mu,
            edges: None,
            meta: String::new(),
            balls: OnceLock::new(),
        })
    }

    /// Space whose metric is the shortest-path metric of a weighted graph.
    pub fn from_graph(n: usize, edges: Vec<Edge>, mu: Vec<f64>) -> Result<Self> {
        if mu.len() != n {
            return Err(Error::InvalidArgument(format!("expected {n} masses, got {}", mu.len())));
        }
        if n > DENSE_CAP {
            return Err(Error::SizeOverflow { requested: n, cap: DENSE_CAP });
        }
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(Error::PointOutOfRange(e.u.max(e.v)));
            }
            if !(e.len.is_finite() && e.len > 0.0) {
                return Err(Error::NonFinite(format!("edge ({},{}) length {}", e.u, e.v, e.len)));
            }
        }
        let dist = all_pairs_shortest_paths(n, &edges)?;
        Ok(MetricMeasureSpace {
            n,
            metric: Metric::Dense(dist),
            source: MetricSource::Graph,
            mu,
            edges: Some(edges),
            meta: String::new(),
            balls: OnceLock::new(),
        })
    }

    pub fn with_meta(mut self, meta: impl Into<String>) -> Self {
        self.meta = meta.into();
        self
    }

    /// Attach a geodesic-surrogate edge graph to a matrix space.
    pub fn with_edges(mut self, edges: Vec<Edge>) -> Self {
        self.edges = Some(edges);
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn edges(&self) -> Option<&[Edge]> {
        self.edges.as_deref()
    }

    pub fn meta(&self) -> &str {
        &self.meta
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn source(&self) -> MetricSource {
        self.source
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        match &self.metric {
            Metric::Lattice(l) => Some(l),
            Metric::Dense(_) => None,
        }
    }

    #[inline]
    pub fn dist(&self, x: usize, y: usize) -> f64 {
        match &self.metric {
            Metric::Dense(d) => d[x * self.n + y],
            Metric::Lattice(l) => l.dist_cells(l.cell(x), l.cell(y)),
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.mu.iter().sum()
    }

    /// Members of the open ball `B(x, r)`, ascending.
    pub fn within(&self, x: usize, r: f64) -> Vec<usize> {
        match &self.metric {
            Metric::Dense(d) => {
                let row = &d[x * self.n..(x + 1) * self.n];
                (0..self.n).filter(|&y| row[y] < r).collect()
            }
            Metric::Lattice(l) => {
                let c = l.cell(x);
                let reach = if l.spacing > 0.0 { (r / l.spacing).floor() as i64 } else { 0 };
                let reach = reach.min(l.side as i64);
                let mut lo = [0i64; 3];
                let mut hi = [0i64; 3];
                for k in 0..l.dim {
                    lo[k] = (c[k] - reach).max(0);
                    hi[k] = (c[k] + reach).min(l.side as i64 - 1);
                }
                let mut out = Vec::new();
                // axis 0 varies fastest so iterate the slowest axis outermost
                let (z0, z1) = if l.dim > 2 { (lo[2], hi[2]) } else { (0, 0) };
                let (y0, y1) = if l.dim > 1 { (lo[1], hi[1]) } else { (0, 0) };
                for cz in z0..=z1 {
                    for cy in y0..=y1 {
                        for cx in lo[0]..=hi[0] {
                            let q = [cx, cy, cz];
                            if l.dist_cells(c, q) < r {
                                out.push(l.index(q).expect("in range"));
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Smallest positive pairwise distance.
    pub fn resolution(&self) -> f64 {
        match &self.metric {
            Metric::Lattice(l) => l.spacing,
            Metric::Dense(d) => {
                let mut h = f64::INFINITY;
                for x in 0..self.n {
                    for y in (x + 1)..self.n {
                        let v = d[x * self.n + y];
                        if v > 0.0 && v < h {
                            h = v;
                        }
                    }
                }
                h
            }
        }
    }

    /// Checks the standing axioms; returns the first violation found.
    ///
    /// Order of checks: finiteness, zero diagonal, symmetry, positivity off
    /// the diagonal, masses, triangle inequality, edge graph.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("space has no points".into()));
        }
        if let Metric::Dense(d) = &self.metric {
            let n = self.n;
            for x in 0..n {
                for y in 0..n {
                    if !d[x * n + y].is_finite() {
                        return Err(Error::NonFinite(format!("d({x},{y})")));
                    }
                }
            }
            for x in 0..n {
                if d[x * n + x] != 0.0 {
                    return Err(Error::NonzeroSelfDistance(x));
                }
            }
            for x in 0..n {
                for y in (x + 1)..n {
                    if d[x * n + y] != d[y * n + x] {
                        return Err(Error::AsymmetricDistance(x, y));
                    }
                }
            }
            for x in 0..n {
                for y in (x + 1)..n {
                    if d[x * n + y] <= 0.0 {
                        return Err(Error::ZeroDistanceDistinct(x, y));
                    }
                }
            }
        }
        for (x, &m) in self.mu.iter().enumerate() {
            if !m.is_finite() {
                return Err(Error::NonFinite(format!("mu({x})")));
            }
            if m <= 0.0 {
                return Err(Error::NonpositiveMass(x));
            }
        }
        if let Metric::Dense(d) = &self.metric {
            if let Some((x, y, z)) = first_triangle_violation(self.n, d) {
                return Err(Error::TriangleViolation { x, y, z });
            }
        }
        if let Some(edges) = &self.edges {
            for e in edges {
                let dd = self.dist(e.u, e.v);
                if e.len < dd * (1.0 - REL_TOL) {
                    return Err(Error::EdgeTooShort { u: e.u, v: e.v, len: e.len, dist: dd });
                }
            }
            if let Some(x) = first_unreachable(self.n, edges) {
                return Err(Error::DisconnectedGraph(x));
            }
        }
        Ok(())
    }

    /// Canonical ball enumeration, built on first use and cached.
    pub fn balls(&self) -> Result<Arc<CanonicalBalls>> {
        if let Some(b) = self.balls.get() {
            return Ok(Arc::clone(b));
        }
        if self.n > DENSE_CAP {
            return Err(Error::SizeOverflow { requested: self.n, cap: DENSE_CAP });
        }
        let built = Arc::new(CanonicalBalls::build(self));
        Ok(Arc::clone(self.balls.get_or_init(|| built)))
    }

    /// Distance matrix as rows; materializes lattice metrics.
    pub fn distance_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|x| (0..self.n).map(|y| self.dist(x, y)).collect()).collect()
    }
}

fn first_triangle_violation(n: usize, d: &[f64]) -> Option<(usize, usize, usize)> {
    // parallel over x, but report the lexicographically first witness
    (0..n).into_par_iter().find_map_first(|x| {
        let rx = &d[x * n..(x + 1) * n];
        for y in (x + 1)..n {
            let dxy = rx[y];
            for z in 0..n {
                if z == x || z == y {
                    continue;
                }
                let through = rx[z] + d[z * n + y];
                if dxy > through * (1.0 + REL_TOL) {
                    return Some((x, y, z));
                }
            }
        }
        None
    })
}

fn first_unreachable(n: usize, edges: &[Edge]) -> Option<usize> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.iter().position(|s| !s)
}

/// Shortest-path distances of an undirected weighted graph, row-major.
pub fn all_pairs_shortest_paths(n: usize, edges: &[Edge]) -> Result<Vec<f64>> {
    if let Some(x) = first_unreachable(n, edges) {
        return Err(Error::DisconnectedGraph(x));
    }
    let mut g: UnGraph<(), f64> = UnGraph::with_capacity(n, edges.len());
    for _ in 0..n {
        g.add_node(());
    }
    for e in edges {
        g.add_edge(NodeIndex::new(e.u), NodeIndex::new(e.v), e.len);
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let dist: HashMap<NodeIndex, f64> =
                petgraph::algo::dijkstra(&g, NodeIndex::new(s), None, |e| *e.weight());
            let mut row = vec![f64::INFINITY; n];
            for (k, v) in dist {
                row[k.index()] = v;
            }
            row[s] = 0.0;
            row
        })
        .collect();
    // symmetrize: Dijkstra from either end may round differently
    let mut d = vec![0.0; n * n];
    for x in 0..n {
        for y in 0..n {
            d[x * n + y] = if x <= y { rows[x][y] } else { rows[y][x] };
        }
    }
    Ok(d)
}

/// Lattice `{0..side}^dim` with spacing `spacing`, masses `spacing^dim` and
/// axis-neighbour edges.
pub fn build_grid_space(dim: usize, side: usize, spacing: f64) -> Result<MetricMeasureSpace> {
    build_grid_space_capped(dim, side, spacing, GRID_CAP)
}

pub fn build_grid_space_capped(
    dim: usize,
    side: usize,
    spacing: f64,
    cap: usize,
) -> Result<MetricMeasureSpace> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dim must be 1, 2 or 3, got {dim}")));
    }
    if side == 0 {
        return Err(Error::InvalidArgument("side must be at least 1".into()));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidArgument(format!("spacing must be positive, got {spacing}")));
    }
    let n = (side as u128).pow(dim as u32);
    if n > cap as u128 {
        return Err(Error::SizeOverflow { requested: n.min(usize::MAX as u128) as usize, cap });
    }
    let n = n as usize;
    let lattice = Lattice { dim, side, spacing };
    let mut edges = Vec::with_capacity(n * dim);
    for i in 0..n {
        let c = lattice.cell(i);
        for k in 0..dim {
            let mut q = c;
            q[k] += 1;
            if let Some(j) = lattice.index(q) {
                edges.push(Edge { u: i, v: j, len: spacing });
            }
        }
    }
    Ok(MetricMeasureSpace {
        n,
        metric: Metric::Lattice(lattice),
        source: MetricSource::Grid,
        mu: vec![spacing.powi(dim as i32); n],
        edges: Some(edges),
        meta: format!("grid dim={dim} side={side} spacing={spacing}"),
        balls: OnceLock::new(),
    })
}

/// Replace the masses of a space, keeping its metric.
pub fn with_masses(space: &MetricMeasureSpace, mu: Vec<f64>) -> Result<MetricMeasureSpace> {
    if mu.len() != space.n {
        return Err(Error::InvalidArgument("mass vector has the wrong length".into()));
    }
    let mut s = space.clone();
    s.mu = mu;
    s.balls = OnceLock::new();
    Ok(s)
}

/// Scale every distance by `factor`.
pub fn rescale_distances(space: &MetricMeasureSpace, factor: f64) -> MetricMeasureSpace {
    let mut s = space.clone();
    s.metric = match &space.metric {
        Metric::Dense(d) => Metric::Dense(d.iter().map(|v| v * factor).collect()),
        Metric::Lattice(l) => Metric::Lattice(Lattice { spacing: l.spacing * factor, ..*l }),
    };
    s.edges = space
        .edges
        .as_ref()
        .map(|es| es.iter().map(|e| Edge { len: e.len * factor, ..*e }).collect());
    s.balls = OnceLock::new();
    s
}

/// An open ball `{y : d(center, y) < radius}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: PointId,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: usize, radius: f64) -> Self {
        Ball { center: PointId(center), radius }
    }

    pub fn members(&self, space: &MetricMeasureSpace) -> Vec<usize> {
        space.within(self.center.0, self.radius)
    }

    pub fn dilate(&self, factor: f64) -> Ball {
        Ball { center: self.center, radius: self.radius * factor }
    }

    pub fn mass(&self, space: &MetricMeasureSpace) -> f64 {
        self.members(space).iter().map(|&y| space.mu()[y]).sum()
    }
}
