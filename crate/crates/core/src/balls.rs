//! Canonical enumeration of the distinct balls of a finite space.
//!
//! For a center `c`, sort the points by `(d(c, y), y)`. The distinct member
//! sets `{y : d(c, y) < r}` over all `r > 0` are exactly the prefixes of that
//! order ending at a change of distance. Prefix `k` is reproduced by every
//! radius in `(d_k, d_{k+1}]`, where `d_0 = 0 < d_1 < …` are the distinct
//! distances; its representative radius is the midpoint of that interval,
//! and `d_max + 1` for the last prefix.

use rayon::prelude::*;
use serde::Serialize;

use crate::space::MetricMeasureSpace;

#[derive(Debug)]
pub struct CanonicalBalls {
    n: usize,
    order: Vec<u32>,
    group: Vec<u32>,
    ends: Vec<Vec<u32>>,
    levels: Vec<Vec<f64>>,
    radii: Vec<Vec<f64>>,
    masses: Vec<Vec<f64>>,
}

struct CenterRow {
    order: Vec<u32>,
    group: Vec<u32>,
    ends: Vec<u32>,
    levels: Vec<f64>,
    radii: Vec<f64>,
    masses: Vec<f64>,
}

impl CanonicalBalls {
    pub fn build(space: &MetricMeasureSpace) -> Self {
        let n = space.len();
        let mu = space.mu();
        let rows: Vec<CenterRow> = (0..n)
            .into_par_iter()
            .map(|c| {
                let d: Vec<f64> = (0..n).map(|y| space.dist(c, y)).collect();
                let mut order: Vec<u32> = (0..n as u32).collect();
                order.sort_by(|&a, &b| d[a as usize].total_cmp(&d[b as usize]).then(a.cmp(&b)));
                let mut ends = Vec::new();
                let mut levels = Vec::new();
                let mut masses = Vec::new();
                let mut group = vec![0u32; n];
                let mut acc = 0.0;
                for (pos, &y) in order.iter().enumerate() {
                    let y = y as usize;
                    acc += mu[y];
                    group[y] = ends.len() as u32;
                    let last = pos + 1 == n || d[order[pos + 1] as usize] != d[y];
                    if last {
                        ends.push(pos as u32 + 1);
                        levels.push(d[y]);
                        masses.push(acc);
                    }
                }
                let m = levels.len();
                let radii = (0..m)
                    .map(|k| if k + 1 < m { 0.5 * (levels[k] + levels[k + 1]) } else { levels[k] + 1.0 })
                    .collect();
                CenterRow { order, group, ends, levels, radii, masses }
            })
            .collect();

        let mut out = CanonicalBalls {
            n,
            order: Vec::with_capacity(n * n),
            group: Vec::with_capacity(n * n),
            ends: Vec::with_capacity(n),
            levels: Vec::with_capacity(n),
            radii: Vec::with_capacity(n),
            masses: Vec::with_capacity(n),
        };
        for r in rows {
            out.order.extend_from_slice(&r.order);
            out.group.extend_from_slice(&r.group);
            out.ends.push(r.ends);
            out.levels.push(r.levels);
            out.radii.push(r.radii);
            out.masses.push(r.masses);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Points sorted by distance from `c`, ties by id.
    pub fn order(&self, c: usize) -> &[u32] {
        &self.order[c * self.n..(c + 1) * self.n]
    }

    /// Exclusive end positions (in [`order`](Self::order)) of each prefix.
    pub fn ends(&self, c: usize) -> &[u32] {
        &self.ends[c]
    }

    pub fn prefix_count(&self, c: usize) -> usize {
        self.ends[c].len()
    }

    /// Total number of (center, prefix) pairs.
    pub fn ball_count(&self) -> usize {
        self.ends.iter().map(Vec::len).sum()
    }

    pub fn members(&self, c: usize, k: usize) -> &[u32] {
        &self.order(c)[..self.ends[c][k] as usize]
    }

    /// Index of the smallest prefix of center `c` containing `y`.
    pub fn group_of(&self, c: usize, y: usize) -> usize {
        self.group[c * self.n + y] as usize
    }

    /// Distinct distances from `c`, ascending.
    pub fn levels(&self, c: usize) -> &[f64] {
        &self.levels[c]
    }

    pub fn radius(&self, c: usize, k: usize) -> f64 {
        self.radii[c][k]
    }

    pub fn radii(&self, c: usize) -> &[f64] {
        &self.radii[c]
    }

    /// μ of each prefix, accumulated in enumeration order.
    pub fn masses(&self, c: usize) -> &[f64] {
        &self.masses[c]
    }

    /// μ(B(c, r)) for an arbitrary real radius.
    pub fn mass_within(&self, c: usize, r: f64) -> f64 {
        let count = self.levels[c].partition_point(|&l| l < r);
        if count == 0 {
            0.0
        } else {
            self.masses[c][count - 1]
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DoublingReport {
    pub constant: f64,
    pub center: usize,
    pub radius: f64,
}

/// `sup μ(B(x, 2r)) / μ(B(x, r))` over all centers and all real radii.
///
/// On the interval `(d_k, d_{k+1}]` the inner ball is fixed while the outer
/// one grows with `r`, so the supremum over that interval sits at its right
/// end `r = d_{k+1}`. The last prefix is the whole space and contributes 1.
pub fn doubling_constant(space: &MetricMeasureSpace) -> crate::Result<DoublingReport> {
    let balls = space.balls()?;
    let per_center: Vec<(f64, f64)> = (0..space.len())
        .into_par_iter()
        .map(|c| {
            let levels = balls.levels(c);
            let masses = balls.masses(c);
            let mut best = (1.0, levels.last().copied().unwrap_or(0.0) + 1.0);
            for k in 0..levels.len().saturating_sub(1) {
                let r = levels[k + 1];
                let ratio = balls.mass_within(c, 2.0 * r) / masses[k];
                if ratio > best.0 {
                    best = (ratio, r);
                }
            }
            best
        })
        .collect();
    let mut rep = DoublingReport { constant: 0.0, center: 0, radius: 0.0 };
    for (c, (v, r)) in per_center.into_iter().enumerate() {
        if v > rep.constant {
            rep = DoublingReport { constant: v, center: c, radius: r };
        }
    }
    Ok(rep)
}
