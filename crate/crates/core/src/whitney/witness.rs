//! A ball inside the intersection of two overlapping balls.

use petgraph::algo::astar;
use petgraph::graph::{NodeIndex, UnGraph};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{Ball, MetricMeasureSpace, REL_TOL};

#[derive(Clone, Debug, Serialize)]
pub struct WitnessBall {
    pub ball: Ball,
    /// 1 when the centers are within half the radius of `B`, 2 otherwise.
    pub case: u8,
    /// `rad(B'') / rad(B)`.
    pub radius_ratio: f64,
}

/// Returns `B'' ⊆ B ∩ B'` for balls with `a·rad(B) ≤ rad(B')` and the
/// center of `B` inside `B'`.
///
/// Near centers give `B(z', a·rad(B)/4)`. Otherwise walk a shortest edge
/// path from `z` towards `z'`: `p` is the last path point within `rad(B)/2`
/// of `z`, `q` the path point whose distance to `z` is closest to half of
/// `d(z, p)`, and the result is `B(q, d(z, q)/2)`. Inclusion is checked on
/// member sets.
pub fn witness_intersection_ball(
    space: &MetricMeasureSpace,
    b: &Ball,
    bp: &Ball,
    a: f64,
) -> Result<WitnessBall> {
    let (z, zp) = (b.center.0, bp.center.0);
    if z >= space.len() || zp >= space.len() {
        return Err(Error::PointOutOfRange(z.max(zp)));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::PreconditionFail(format!("a = {a} must lie in (0, 1]")));
    }
    if a * b.radius > bp.radius {
        return Err(Error::PreconditionFail(format!(
            "a·rad(B) = {} exceeds rad(B') = {}",
            a * b.radius,
            bp.radius
        )));
    }
    let d = space.dist(z, zp);
    if d >= bp.radius {
        return Err(Error::PreconditionFail(format!("center of B is at distance {d} ≥ rad(B') = {}", bp.radius)));
    }
    let (ball, case) = if d <= b.radius / 2.0 {
        (Ball::new(zp, a * b.radius / 4.0), 1)
    } else {
        let path = edge_path(space, z, zp)?;
        let limit = b.radius / 2.0 * (1.0 + REL_TOL);
        let p = *path.iter().rev().find(|&&x| space.dist(z, x) <= limit).expect("path starts at z");
        let half = space.dist(z, p) / 2.0;
        let q = *path
            .iter()
            .min_by(|&&x, &&y| (space.dist(z, x) - half).abs().total_cmp(&(space.dist(z, y) - half).abs()))
            .expect("path is nonempty");
        let r = space.dist(z, q) / 2.0;
        if r <= 0.0 {
            return Err(Error::InclusionFail("path too coarse: midpoint coincides with the center of B".into()));
        }
        (Ball::new(q, r), 2)
    };
    let inner = ball.members(space);
    if let Some(&y) = inner.iter().find(|&&y| space.dist(z, y) >= b.radius || space.dist(zp, y) >= bp.radius) {
        return Err(Error::InclusionFail(format!("point {y} of B'' lies outside B ∩ B'")));
    }
    Ok(WitnessBall { radius_ratio: ball.radius / b.radius, ball, case })
}

fn edge_path(space: &MetricMeasureSpace, from: usize, to: usize) -> Result<Vec<usize>> {
    let edges = space.edges().ok_or(Error::NoEdgeGraph)?;
    let mut g: UnGraph<(), f64> = UnGraph::with_capacity(space.len(), edges.len());
    for _ in 0..space.len() {
        g.add_node(());
    }
    for e in edges {
        g.add_edge(NodeIndex::new(e.u), NodeIndex::new(e.v), e.len);
    }
    let (_, path) = astar(&g, NodeIndex::new(from), |n| n.index() == to, |e| *e.weight(), |_| 0.0)
        .ok_or(Error::Disconnected(from, to))?;
    Ok(path.into_iter().map(|n| n.index()).collect())
}
