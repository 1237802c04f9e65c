//! Greedy Whitney covers.
//!
//! Every point of `D` proposes the ball `B(x, δ(x)/4)`. Proposals are taken
//! by decreasing radius (ties by id) and accepted when the quarter-ball
//! `B(x, r/4)` meets no earlier accepted quarter-ball. A rejected `x` shares
//! a point with some accepted `B(y, r_y/4)` where `r_y ≥ r_x`, so
//! `d(x, y) < r_y/2` and `x` is covered by `B(y, r_y)`.

use rayon::prelude::*;
use serde::Serialize;

use super::Domain;
use crate::error::{Error, Result};
use crate::space::{MetricMeasureSpace, REL_TOL};

#[derive(Clone, Debug, Serialize)]
pub struct WhitneyBall {
    pub center: usize,
    pub radius: f64,
    pub members_count: usize,
    /// Radius at least twice the resolution of the space.
    pub resolved: bool,
    #[serde(skip)]
    pub members: Vec<usize>,
    #[serde(skip)]
    pub mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WhitneyCover {
    pub balls: Vec<WhitneyBall>,
    #[serde(rename = "overlap_N")]
    pub overlap_n: usize,
    /// Largest `r_i / r_j` over intersecting pairs.
    pub max_radius_ratio: f64,
    /// Largest `μ(B_i) / μ(B_j)` over intersecting pairs.
    pub max_mass_ratio: f64,
    pub intersecting_pairs: usize,
    pub resolved_count: usize,
    #[serde(skip)]
    pub adjacency: Vec<Vec<usize>>,
    /// For every point, the indices of the balls containing it.
    #[serde(skip)]
    pub covering: Vec<Vec<usize>>,
}

impl WhitneyCover {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Index of the largest ball containing `x` (ties by index).
    pub fn ball_containing(&self, x: usize) -> Option<usize> {
        self.covering[x]
            .iter()
            .copied()
            .max_by(|&a, &b| self.balls[a].radius.total_cmp(&self.balls[b].radius).then(b.cmp(&a)))
    }
}

pub fn whitney_cover(space: &MetricMeasureSpace, domain: &Domain) -> Result<WhitneyCover> {
    let mut order: Vec<usize> = domain.set().ids().to_vec();
    order.sort_by(|&a, &b| domain.boundary_distance(b).total_cmp(&domain.boundary_distance(a)).then(a.cmp(&b)));
    let mut taken = vec![false; space.len()];
    let mut centers = Vec::new();
    for x in order {
        let r = domain.boundary_distance(x) / 4.0;
        let quarter = space.within(x, r / 4.0);
        if quarter.iter().any(|&y| taken[y]) {
            continue;
        }
        for y in quarter {
            taken[y] = true;
        }
        centers.push((x, r));
    }

    let h = domain.resolution();
    let mu = space.mu();
    let balls: Vec<WhitneyBall> = centers
        .into_par_iter()
        .map(|(x, r)| {
            let members = space.within(x, r);
            let mass = members.iter().map(|&y| mu[y]).sum();
            WhitneyBall { center: x, radius: r, members_count: members.len(), resolved: r >= 2.0 * h, members, mass }
        })
        .collect();

    let mut covering = vec![Vec::new(); space.len()];
    for (i, b) in balls.iter().enumerate() {
        for &y in &b.members {
            covering[y].push(i);
        }
    }
    let overlap_n = covering.iter().map(Vec::len).max().unwrap_or(0);
    let mut adjacency = vec![Vec::new(); balls.len()];
    for list in &covering {
        for (a, &i) in list.iter().enumerate() {
            for &j in &list[a + 1..] {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    for nb in &mut adjacency {
        nb.sort_unstable();
        nb.dedup();
    }
    let mut max_radius_ratio = 1.0f64;
    let mut max_mass_ratio = 1.0f64;
    let mut intersecting_pairs = 0;
    for (i, nb) in adjacency.iter().enumerate() {
        for &j in nb {
            if i < j {
                intersecting_pairs += 1;
            }
            max_radius_ratio = max_radius_ratio.max(balls[i].radius / balls[j].radius);
            max_mass_ratio = max_mass_ratio.max(balls[i].mass / balls[j].mass);
        }
    }
    let resolved_count = balls.iter().filter(|b| b.resolved).count();
    Ok(WhitneyCover {
        balls,
        overlap_n,
        max_radius_ratio,
        max_mass_ratio,
        intersecting_pairs,
        resolved_count,
        adjacency,
        covering,
    })
}

/// Counts of what [`check_cover_invariants`] inspected.
#[derive(Clone, Debug, Serialize)]
pub struct CoverSummary {
    pub balls: usize,
    pub points_checked: usize,
    pub intersecting_pairs: usize,
}

/// Re-verifies every Whitney property from scratch: disjoint quarter-balls,
/// coverage of `D`, `2B ⊆ D`, `2r ≤ δ ≤ 6r` on `2B`, and radius ratios in
/// `[1/4, 4]` for intersecting balls.
pub fn check_cover_invariants(
    space: &MetricMeasureSpace,
    domain: &Domain,
    cover: &WhitneyCover,
) -> Result<CoverSummary> {
    let fail = |msg: String| Err(Error::InvariantViolation(msg));
    let mut owner = vec![usize::MAX; space.len()];
    for (i, b) in cover.balls.iter().enumerate() {
        for y in space.within(b.center, b.radius / 4.0) {
            if owner[y] != usize::MAX {
                return fail(format!("quarter-balls {} and {i} share point {y}", owner[y]));
            }
            owner[y] = i;
        }
    }
    let mut covered = vec![false; space.len()];
    for b in &cover.balls {
        for y in space.within(b.center, b.radius) {
            covered[y] = true;
        }
    }
    if let Some(&x) = domain.set().ids().iter().find(|&&x| !covered[x]) {
        return fail(format!("point {x} of D is not covered"));
    }
    let checked: Vec<Result<usize>> = cover
        .balls
        .par_iter()
        .enumerate()
        .map(|(i, b)| {
            let double = space.within(b.center, 2.0 * b.radius);
            for &y in &double {
                if !domain.contains(y) {
                    return Err(Error::InvariantViolation(format!("2B_{i} leaves D at {y}")));
                }
                let d = domain.boundary_distance(y);
                if 2.0 * b.radius > d * (1.0 + REL_TOL) || d > 6.0 * b.radius * (1.0 + REL_TOL) {
                    return Err(Error::InvariantViolation(format!(
                        "boundary distance {d} at {y} outside [2r, 6r] for ball {i} (r = {})",
                        b.radius
                    )));
                }
            }
            Ok(double.len())
        })
        .collect();
    let mut points_checked = 0;
    for c in checked {
        points_checked += c?;
    }
    let mut pairs = 0;
    for (i, nb) in cover.adjacency.iter().enumerate() {
        for &j in nb {
            let ratio = cover.balls[i].radius / cover.balls[j].radius;
            if !(0.25..=4.0).contains(&ratio) {
                return fail(format!("intersecting balls {i} and {j} have radius ratio {ratio}"));
            }
            pairs += 1;
        }
    }
    Ok(CoverSummary { balls: cover.balls.len(), points_checked, intersecting_pairs: pairs / 2 })
}
