//! Sampled statistics over Whitney covers: chain length against
//! quasihyperbolic distance, weight growth along chains, and comparison of
//! Whitney-like balls.
//!
//! Continuous samplers draw points of the unit cube and map them to the
//! nearest lattice point, so the same seed follows the same continuous
//! sample across refinements.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{band_alpha, chain_path, linear_envelope, pearson, Domain, QhGraph, WhitneyCover};
use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;

/// Which pairs of resolved balls enter a chain report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSelection {
    /// Every unordered pair of distinct chain-connected resolved balls.
    All,
    /// Uniformly drawn pairs of distinct resolved balls.
    Sample { pairs: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainPair {
    pub i: usize,
    pub j: usize,
    pub k_tilde: usize,
    pub qh: f64,
    /// `k̃ / max(k, 1)`.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub selection: PairSelection,
    pub pair_count: usize,
    pub correlation: Option<f64>,
    /// Smallest `α` with every `k̃ / max(k, 1)` in `[1/α, α]`.
    pub alpha: f64,
    /// Listed for sampled selections only.
    pub pairs: Vec<ChainPair>,
}

fn resolved(cover: &WhitneyCover) -> Vec<usize> {
    (0..cover.len()).filter(|&i| cover.balls[i].resolved).collect()
}

fn chain_lengths(cover: &WhitneyCover, from: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; cover.len()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        let next = dist[x].map(|d| d + 1);
        for &y in &cover.adjacency[x] {
            if dist[y].is_none() {
                dist[y] = next;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Chain length `k̃` against the quasihyperbolic distance `k` of the centers.
pub fn chain_comparability(
    space: &MetricMeasureSpace,
    cover: &WhitneyCover,
    qh: &QhGraph,
    selection: PairSelection,
) -> Result<ChainReport> {
    let res = resolved(cover);
    let (kt, kq, pairs) = match selection {
        PairSelection::All => {
            let rows: Vec<Result<(Vec<f64>, Vec<f64>)>> = res
                .par_iter()
                .enumerate()
                .map(|(a, &i)| {
                    let d = qh.distances_from(cover.balls[i].center, space.len())?;
                    let chain = chain_lengths(cover, i);
                    let (mut kt, mut kq) = (Vec::new(), Vec::new());
                    for &j in &res[a + 1..] {
                        if let Some(k) = chain[j] {
                            kt.push(k as f64);
                            kq.push(d[cover.balls[j].center]);
                        }
                    }
                    Ok((kt, kq))
                })
                .collect();
            let (mut kt, mut kq) = (Vec::new(), Vec::new());
            for r in rows {
                let (a, b) = r?;
                kt.extend(a);
                kq.extend(b);
            }
            (kt, kq, Vec::new())
        }
        PairSelection::Sample { pairs, seed } => {
            if res.len() < 2 {
                return Err(Error::InvalidArgument("fewer than two resolved balls".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(pairs);
            let mut attempts = 0;
            while out.len() < pairs && attempts < 100 * pairs.max(1) {
                attempts += 1;
                let (i, j) = (res[rng.gen_range(0..res.len())], res[rng.gen_range(0..res.len())]);
                if i == j {
                    continue;
                }
                let k_tilde = match chain_path(cover, i, j) {
                    Ok(p) => p.len() - 1,
                    Err(Error::Unreachable(..)) => continue,
                    Err(e) => return Err(e),
                };
                let k = qh.distance(cover.balls[i].center, cover.balls[j].center)?;
                out.push(ChainPair { i, j, k_tilde, qh: k, ratio: k_tilde as f64 / k.max(1.0) });
            }
            let kt = out.iter().map(|p| p.k_tilde as f64).collect();
            let kq = out.iter().map(|p| p.qh).collect();
            (kt, kq, out)
        }
    };
    let ratios: Vec<f64> = kt.iter().zip(&kq).map(|(t, q)| t / q.max(1.0)).collect();
    Ok(ChainReport {
        selection,
        pair_count: kt.len(),
        correlation: pearson(&kt, &kq),
        alpha: band_alpha(&ratios),
        pairs,
    })
}

/// `log(avg_{B_i} w / avg_{B_j} w) ≤ α k̃ + β`. The slope is the largest
/// per-step log ratio over intersecting cover balls, `β` the smallest
/// nonnegative offset covering the training pairs; held-out pairs are
/// then checked against the fitted line.
#[derive(Clone, Debug, Serialize)]
pub struct ChainWeightFit {
    pub alpha: f64,
    pub beta: f64,
    pub training_pairs: usize,
    pub heldout_pairs: usize,
    pub heldout_violations: usize,
    pub seed: u64,
}

pub fn ball_averages(space: &MetricMeasureSpace, cover: &WhitneyCover, w: &[f64]) -> Vec<f64> {
    let mu = space.mu();
    cover
        .balls
        .iter()
        .map(|b| b.members.iter().map(|&y| w[y] * mu[y]).sum::<f64>() / b.mass)
        .collect()
}

pub fn chain_weight_fit(
    space: &MetricMeasureSpace,
    cover: &WhitneyCover,
    w: &[f64],
    pairs: usize,
    seed: u64,
) -> Result<ChainWeightFit> {
    let avg = ball_averages(space, cover, w);
    let mut alpha = 0.0f64;
    for (i, nb) in cover.adjacency.iter().enumerate() {
        for &j in nb {
            alpha = alpha.max((avg[i] / avg[j]).ln());
        }
    }
    let res = resolved(cover);
    if res.len() < 2 {
        return Err(Error::InvalidArgument("fewer than two resolved balls".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = |count: usize| -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count && attempts < 100 * count.max(1) {
            attempts += 1;
            let (i, j) = (res[rng.gen_range(0..res.len())], res[rng.gen_range(0..res.len())]);
            match chain_path(cover, i, j) {
                Ok(path) => out.push(((path.len() - 1) as f64, (avg[i] / avg[j]).ln())),
                Err(Error::Unreachable(..)) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    };
    let training = sample(pairs)?;
    let heldout = sample(pairs)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = training.iter().copied().unzip();
    let beta = linear_envelope(&xs, &ys, alpha).max(0.0);
    let heldout_violations = heldout.iter().filter(|&&(k, l)| l > alpha * k + beta + 1e-12).count();
    Ok(ChainWeightFit {
        alpha,
        beta,
        training_pairs: training.len(),
        heldout_pairs: heldout.len(),
        heldout_violations,
        seed,
    })
}

/// A ball `B(x, t δ(x))` whose member set keeps `dist(B, X∖D) / rad(B)` in `[1/2, 4]`.
#[derive(Clone, Debug)]
pub struct WhitneyLikeBall {
    pub center: usize,
    pub radius: f64,
    pub members: Vec<usize>,
}

fn unit_point(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect()
}

fn nearest(space: &MetricMeasureSpace, u: &[f64]) -> Option<usize> {
    let l = space.lattice()?;
    let mut c = [0i64; 3];
    for (k, &t) in u.iter().enumerate().take(l.dim) {
        if !(0.0..=1.0).contains(&t) {
            return None;
        }
        c[k] = ((t / l.spacing).round() as i64).clamp(0, l.side as i64 - 1);
    }
    l.index(c)
}

fn whitney_like(space: &MetricMeasureSpace, domain: &Domain, x: usize, t: f64) -> Option<WhitneyLikeBall> {
    let radius = t * domain.boundary_distance(x);
    let members = space.within(x, radius);
    let gap = members.iter().map(|&y| domain.boundary_distance(y)).fold(f64::INFINITY, f64::min);
    (0.5..=4.0).contains(&(gap / radius)).then_some(WhitneyLikeBall { center: x, radius, members })
}

/// Draws a Whitney-like ball with `t ∈ [1/5, 2/3]` around a uniform point of
/// the unit cube whose nearest lattice point lies in `D` at boundary
/// distance at least `min_delta`.
pub fn sample_whitney_like(
    space: &MetricMeasureSpace,
    domain: &Domain,
    min_delta: f64,
    rng: &mut ChaCha8Rng,
) -> Option<WhitneyLikeBall> {
    let dim = space.lattice()?.dim;
    let u = unit_point(dim, rng);
    let t = rng.gen_range(0.2..2.0 / 3.0);
    let x = nearest(space, &u)?;
    if !domain.contains(x) || domain.boundary_distance(x) < min_delta {
        return None;
    }
    whitney_like(space, domain, x, t)
}

/// Whitney balls meeting sampled Whitney-like balls.
#[derive(Clone, Debug, Serialize)]
pub struct NeighbourStats {
    pub samples: usize,
    /// Largest number of Whitney balls meeting one sampled ball.
    pub max_count: usize,
    /// Largest radius quotient, in either direction, against a meeting Whitney ball.
    pub max_radius_factor: f64,
    pub seed: u64,
}

pub fn whitney_like_neighbours(
    space: &MetricMeasureSpace,
    domain: &Domain,
    cover: &WhitneyCover,
    samples: usize,
    seed: u64,
    min_delta: f64,
) -> Result<NeighbourStats> {
    space.lattice().ok_or_else(|| Error::InvalidArgument("sampling needs a lattice space".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut taken, mut attempts) = (0, 0);
    let (mut max_count, mut max_radius_factor) = (0usize, 1.0f64);
    while taken < samples && attempts < 200 * samples.max(1) {
        attempts += 1;
        let Some(b) = sample_whitney_like(space, domain, min_delta, &mut rng) else { continue };
        let mut hits: Vec<usize> = b.members.iter().flat_map(|&y| cover.covering[y].iter().copied()).collect();
        hits.sort_unstable();
        hits.dedup();
        max_count = max_count.max(hits.len());
        for &k in &hits {
            let q = cover.balls[k].radius / b.radius;
            max_radius_factor = max_radius_factor.max(q).max(1.0 / q);
        }
        taken += 1;
    }
    Ok(NeighbourStats { samples: taken, max_count, max_radius_factor, seed })
}

/// Integral ratios of Whitney-like balls at bounded quasihyperbolic distance.
#[derive(Clone, Debug, Serialize)]
pub struct NearBallBand {
    pub pairs: usize,
    /// Smallest `α` with every `∫_{B₁} w / ∫_{B₂} w` in `[1/α, α]`.
    pub alpha: f64,
    pub qh_bound: f64,
    /// Largest discrete quasihyperbolic distance between paired centers.
    pub max_qh: f64,
    pub seed: u64,
}

/// Pairs a Whitney-like ball around a uniform point `u` with one around
/// `v = u + s·(k₀/2)·δ(u)·θ`, `s ∈ [0, 1)` and `θ` a random direction. Along
/// the segment `δ ≥ δ(u)/2`, so the continuous quasihyperbolic distance of
/// the centers stays below `k₀`; the largest discrete value is recorded.
/// Radii use `t ∈ [1/4, 3/5]`, inside the Whitney-like range with margin.
#[allow(clippy::too_many_arguments)]
pub fn near_ball_band(
    space: &MetricMeasureSpace,
    domain: &Domain,
    qh: &QhGraph,
    w: &[f64],
    pairs: usize,
    seed: u64,
    qh_bound: f64,
    min_delta: f64,
) -> Result<NearBallBand> {
    let dim = space.lattice().ok_or_else(|| Error::InvalidArgument("sampling needs a lattice space".into()))?.dim;
    let mu = space.mu();
    let integral = |b: &WhitneyLikeBall| b.members.iter().map(|&y| w[y] * mu[y]).sum::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(pairs);
    let mut max_qh = 0.0f64;
    let mut attempts = 0;
    while ratios.len() < pairs && attempts < 200 * pairs.max(1) {
        attempts += 1;
        let u = unit_point(dim, &mut rng);
        let dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (t1, t2, s) = (rng.gen_range(0.25..0.6), rng.gen_range(0.25..0.6), rng.gen_range(0.0..1.0));
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        let Some(x) = nearest(space, &u) else { continue };
        if norm == 0.0 || norm > 1.0 || !domain.contains(x) || domain.boundary_distance(x) < min_delta {
            continue;
        }
        let reach = s * qh_bound / 2.0 * domain.boundary_distance(x);
        let v: Vec<f64> = u.iter().zip(&dir).map(|(a, d)| a + reach * d / norm).collect();
        let Some(y) = nearest(space, &v) else { continue };
        if !domain.contains(y) {
            continue;
        }
        if let (Some(a), Some(b)) = (whitney_like(space, domain, x, t1), whitney_like(space, domain, y, t2)) {
            max_qh = max_qh.max(qh.distance(x, y)?);
            ratios.push(integral(&a) / integral(&b));
        }
    }
    Ok(NearBallBand { pairs: ratios.len(), alpha: band_alpha(&ratios), qh_bound, max_qh, seed })
}

/// Largest quasihyperbolic distance from a center to a member of the same
/// ball, over up to `limit` resolved balls spread evenly through the cover.
pub fn qh_ball_radius(space: &MetricMeasureSpace, cover: &WhitneyCover, qh: &QhGraph, limit: usize) -> Result<f64> {
    let res = resolved(cover);
    let stride = (res.len() / limit.max(1)).max(1);
    let picked: Vec<usize> = res.into_iter().step_by(stride).collect();
    let radii: Vec<Result<f64>> = picked
        .par_iter()
        .map(|&i| {
            let b = &cover.balls[i];
            let d = qh.distances_from(b.center, space.len())?;
            Ok(b.members.iter().map(|&y| d[y]).fold(0.0, f64::max))
        })
        .collect();
    let mut best = 0.0f64;
    for r in radii {
        best = best.max(r?);
    }
    Ok(best)
}
