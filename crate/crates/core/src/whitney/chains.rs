//! Chains of intersecting Whitney balls.

use std::collections::VecDeque;

use serde::Serialize;

use super::{qh_distance, Domain, WhitneyCover};
use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;
use crate::subset::check_weight;

fn bfs(cover: &WhitneyCover, from: usize) -> Vec<Option<usize>> {
    let mut parent = vec![None; cover.len()];
    parent[from] = Some(from);
    let mut queue = VecDeque::from([from]);
    while let Some(i) = queue.pop_front() {
        for &j in &cover.adjacency[i] {
            if parent[j].is_none() {
                parent[j] = Some(i);
                queue.push_back(j);
            }
        }
    }
    parent
}

fn check_index(cover: &WhitneyCover, i: usize) -> Result<()> {
    if i >= cover.len() {
        return Err(Error::InvalidArgument(format!("ball index {i} out of range ({} balls)", cover.len())));
    }
    Ok(())
}

/// Balls `i = B₀, …, B_k = j` of one shortest chain.
pub fn chain_path(cover: &WhitneyCover, i: usize, j: usize) -> Result<Vec<usize>> {
    check_index(cover, i)?;
    check_index(cover, j)?;
    let parent = bfs(cover, i);
    if parent[j].is_none() {
        return Err(Error::Unreachable(i, j));
    }
    let mut path = vec![j];
    let mut at = j;
    while at != i {
        at = parent[at].expect("visited");
        path.push(at);
    }
    path.reverse();
    Ok(path)
}

/// `k̃(B_i, B_j)`: number of steps of the shortest chain.
pub fn shortest_chain_length(cover: &WhitneyCover, i: usize, j: usize) -> Result<usize> {
    Ok(chain_path(cover, i, j)?.len() - 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainWeightReport {
    pub i: usize,
    pub j: usize,
    /// `avg_{B_i} w / avg_{B_j} w`.
    pub ratio: f64,
    pub k_tilde: usize,
    pub qh: f64,
    /// Quotients of consecutive ball averages along the chain.
    pub steps: Vec<f64>,
    pub p: f64,
}

fn ball_average(space: &MetricMeasureSpace, cover: &WhitneyCover, w: &[f64], i: usize) -> f64 {
    let b = &cover.balls[i];
    let mu = space.mu();
    b.members.iter().map(|&y| w[y] * mu[y]).sum::<f64>() / b.mass
}

pub fn chain_weight_ratio(
    space: &MetricMeasureSpace,
    domain: &Domain,
    w: &[f64],
    p: f64,
    cover: &WhitneyCover,
    i: usize,
    j: usize,
) -> Result<ChainWeightReport> {
    check_weight(w, Some(domain.set()))?;
    let path = chain_path(cover, i, j)?;
    let avgs: Vec<f64> = path.iter().map(|&b| ball_average(space, cover, w, b)).collect();
    let steps = avgs.windows(2).map(|a| a[0] / a[1]).collect();
    let qh = qh_distance(space, domain, cover.balls[i].center, cover.balls[j].center)?;
    Ok(ChainWeightReport {
        i,
        j,
        ratio: avgs[0] / avgs[avgs.len() - 1],
        k_tilde: path.len() - 1,
        qh,
        steps,
        p,
    })
}
