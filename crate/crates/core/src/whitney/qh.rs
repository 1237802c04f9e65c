//! Discrete quasihyperbolic distance: shortest paths in the edge graph of
//! `D` with edge weight `len · 2 / (δ(u) + δ(v))`, the trapezoid rule for
//! `∫ ds / δ` along the edge.

use std::collections::HashMap;

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};

use super::Domain;
use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;

#[derive(Clone, Debug)]
pub struct QhGraph {
    graph: UnGraph<usize, f64>,
    node: HashMap<usize, NodeIndex>,
}

impl QhGraph {
    pub fn new(space: &MetricMeasureSpace, domain: &Domain) -> Result<Self> {
        let edges = space.edges().ok_or(Error::NoEdgeGraph)?;
        let mut graph = UnGraph::default();
        let mut node = HashMap::new();
        for &x in domain.set().ids() {
            node.insert(x, graph.add_node(x));
        }
        for e in edges {
            if let (Some(&a), Some(&b)) = (node.get(&e.u), node.get(&e.v)) {
                let weight = e.len * 2.0 / (domain.boundary_distance(e.u) + domain.boundary_distance(e.v));
                graph.add_edge(a, b, weight);
            }
        }
        Ok(QhGraph { graph, node })
    }

    fn index(&self, x: usize) -> Result<NodeIndex> {
        self.node
            .get(&x)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("point {x} is not in the domain")))
    }

    /// Always searches from the smaller id so the result is symmetric bit for bit.
    pub fn distance(&self, x: usize, y: usize) -> Result<f64> {
        let (a, b) = (self.index(x.min(y))?, self.index(x.max(y))?);
        if a == b {
            return Ok(0.0);
        }
        dijkstra(&self.graph, a, Some(b), |e| *e.weight())
            .get(&b)
            .copied()
            .ok_or(Error::Disconnected(x, y))
    }

    /// Distances from `x` to every point of the space; infinite when
    /// unreachable or outside the domain.
    pub fn distances_from(&self, x: usize, n: usize) -> Result<Vec<f64>> {
        let a = self.index(x)?;
        let mut out = vec![f64::INFINITY; n];
        for (k, d) in dijkstra(&self.graph, a, None, |e| *e.weight()) {
            out[self.graph[k]] = d;
        }
        Ok(out)
    }
}

pub fn qh_distance(space: &MetricMeasureSpace, domain: &Domain, x: usize, y: usize) -> Result<f64> {
    QhGraph::new(space, domain)?.distance(x, y)
}
