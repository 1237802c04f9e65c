//! Muckenhoupt characteristics on finite spaces.
//!
//! Every supremum over balls is evaluated exactly over the canonical ball
//! enumeration. For `p > 1` the ball functional is
//! `(1/μ(B) Σ_{B∩E} w μ) · (1/μ(B) Σ_{B∩E} w^{-1/(p-1)} μ)^{p-1}`, and an
//! empty `B ∩ E` contributes 0. For `p = 1` it is the average over `B ∩ E`
//! (normalized by `μ(B)`) divided by the minimum of `w` on `B ∩ E`; empty
//! intersections are skipped.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{MetricMeasureSpace, REL_TOL};
use crate::subset::{check_len, check_weight, Subset};

/// Exponents used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApParams {
    pub p: f64,
    pub q: Option<f64>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
}

impl ApParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::ExponentRange(p));
        }
        Ok(ApParams { p, q: None, eps: None, delta: None })
    }

    /// Hölder conjugate; infinite at `p = 1`.
    pub fn conjugate(&self) -> f64 {
        conjugate(self.p)
    }
}

pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CharacteristicKind {
    #[serde(rename = "Ap_tilde")]
    ApTilde,
    #[serde(rename = "A1_tilde")]
    A1Tilde,
    #[serde(rename = "Ap_domain")]
    ApDomain,
    #[serde(rename = "A1_domain")]
    A1Domain,
}

/// A canonical ball: prefix `prefix` of the enumeration around `center`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub center: usize,
    pub prefix: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicReport {
    pub value: f64,
    pub witness: Witness,
    pub p: f64,
    pub kind: CharacteristicKind,
}

/// One row of a per-ball table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BallValue {
    pub center: usize,
    pub prefix: usize,
    pub value: f64,
}

/// Which balls enter a supremum.
#[derive(Clone, Copy, Debug)]
pub enum Scope<'a> {
    All,
    /// Only balls whose member set lies inside the subset.
    Inside(&'a Subset),
}

/// Calls `visit(k, value)` for every prefix of center `c` in scope; the value
/// is `None` when the functional is vacuous (empty intersection at `p = 1`).
fn scan_center(
    space: &MetricMeasureSpace,
    c: usize,
    e: Option<&Subset>,
    w: &[f64],
    p: f64,
    scope: Scope<'_>,
    mut visit: impl FnMut(usize, Option<f64>),
) -> Result<()> {
    let balls = space.balls()?;
    let mu = space.mu();
    if let Scope::Inside(d) = scope {
        if !d.contains(c) {
            return Ok(());
        }
    }
    let order = balls.order(c);
    let ends = balls.ends(c);
    let masses = balls.masses(c);
    let dual = if p > 1.0 { -1.0 / (p - 1.0) } else { 0.0 };
    let mut s_w = 0.0;
    let mut s_dual = 0.0;
    let mut min_w = f64::INFINITY;
    let mut pos = 0usize;
    for (k, &end) in ends.iter().enumerate() {
        let end = end as usize;
        let mut leaves_scope = false;
        while pos < end {
            let y = order[pos] as usize;
            if let Scope::Inside(d) = scope {
                if !d.contains(y) {
                    leaves_scope = true;
                }
            }
            if e.is_none_or(|e| e.contains(y)) {
                s_w += w[y] * mu[y];
                if p > 1.0 {
                    s_dual += w[y].powf(dual) * mu[y];
                } else if w[y] < min_w {
                    min_w = w[y];
                }
            }
            pos += 1;
        }
        if leaves_scope {
            break;
        }
        let m = masses[k];
        let value = if p > 1.0 {
            if s_w == 0.0 {
                Some(0.0)
            } else {
                Some((s_w / m) * (s_dual / m).powf(p - 1.0))
            }
        } else if min_w.is_finite() {
            Some((s_w / m) / min_w)
        } else {
            None
        };
        visit(k, value);
    }
    Ok(())
}

fn supremum(
    space: &MetricMeasureSpace,
    e: Option<&Subset>,
    w: &[f64],
    p: f64,
    scope: Scope<'_>,
) -> Result<(f64, Witness)> {
    space.balls()?;
    let per_center: Vec<Result<Option<(f64, usize)>>> = (0..space.len())
        .into_par_iter()
        .map(|c| {
            let mut best: Option<(f64, usize)> = None;
            scan_center(space, c, e, w, p, scope, |k, v| {
                if let Some(v) = v {
                    if best.is_none_or(|(b, _)| v > b) {
                        best = Some((v, k));
                    }
                }
            })?;
            Ok(best)
        })
        .collect();
    let mut best: Option<(f64, Witness)> = None;
    for (c, r) in per_center.into_iter().enumerate() {
        if let Some((v, k)) = r? {
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, Witness { center: c, prefix: k }));
            }
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no ball in scope".into()))
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::ExponentRange(p));
    }
    Ok(())
}

/// Induced characteristic `[w]_{Ã_p(E)}`; `E = X` gives the classical `A_p(X)`.
pub fn ap_tilde_characteristic(
    space: &MetricMeasureSpace,
    e: &Subset,
    w: &[f64],
    p: f64,
) -> Result<CharacteristicReport> {
    check_p(p)?;
    e.check_space(space)?;
    check_len(w, space)?;
    check_weight(w, Some(e))?;
    let (value, witness) = supremum(space, Some(e), w, p, Scope::All)?;
    let kind = if p == 1.0 { CharacteristicKind::A1Tilde } else { CharacteristicKind::ApTilde };
    Ok(CharacteristicReport { value, witness, p, kind })
}

/// Classical `A_p(X)` characteristic of a weight on the whole space.
pub fn ap_characteristic(space: &MetricMeasureSpace, w: &[f64], p: f64) -> Result<CharacteristicReport> {
    ap_tilde_characteristic(space, &Subset::full(space.len()), w, p)
}

/// `[w]_{A_p(D)}`: the same functional over balls contained in `D`.
pub fn ap_domain_characteristic(
    space: &MetricMeasureSpace,
    d: &Subset,
    w: &[f64],
    p: f64,
) -> Result<CharacteristicReport> {
    check_p(p)?;
    d.check_space(space)?;
    check_len(w, space)?;
    check_weight(w, Some(d))?;
    let (value, witness) = supremum(space, Some(d), w, p, Scope::Inside(d))?;
    let kind = if p == 1.0 { CharacteristicKind::A1Domain } else { CharacteristicKind::ApDomain };
    Ok(CharacteristicReport { value, witness, p, kind })
}

/// Every ball functional value, in (center, prefix) order.
pub fn characteristic_table(
    space: &MetricMeasureSpace,
    e: Option<&Subset>,
    w: &[f64],
    p: f64,
    scope: Scope<'_>,
) -> Result<Vec<BallValue>> {
    check_p(p)?;
    check_len(w, space)?;
    check_weight(w, e)?;
    let mut rows = Vec::new();
    for c in 0..space.len() {
        scan_center(space, c, e, w, p, scope, |k, v| {
            if let Some(value) = v {
                rows.push(BallValue { center: c, prefix: k, value });
            }
        })?;
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReverseHolderReport {
    pub value: f64,
    pub witness: Witness,
    pub delta: f64,
}

/// Smallest `C` with `(avg_B w^{1+δ})^{1/(1+δ)} ≤ C avg_B w` over the scope.
/// With `Scope::Inside(D)`, `w` only needs to be positive on `D`.
pub fn reverse_holder_constant(
    space: &MetricMeasureSpace,
    w: &[f64],
    delta: f64,
    scope: Scope<'_>,
) -> Result<ReverseHolderReport> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::ExponentRange(delta));
    }
    check_len(w, space)?;
    match scope {
        Scope::All => check_weight(w, None)?,
        Scope::Inside(d) => check_weight(w, Some(d))?,
    }
    let balls = space.balls()?;
    let mu = space.mu();
    let per_center: Vec<Option<(f64, usize)>> = (0..space.len())
        .into_par_iter()
        .map(|c| {
            if let Scope::Inside(d) = scope {
                if !d.contains(c) {
                    return None;
                }
            }
            let order = balls.order(c);
            let mut best: Option<(f64, usize)> = None;
            let (mut s1, mut s2, mut pos) = (0.0, 0.0, 0usize);
            for (k, &end) in balls.ends(c).iter().enumerate() {
                let mut inside = true;
                while pos < end as usize {
                    let y = order[pos] as usize;
                    if let Scope::Inside(d) = scope {
                        inside &= d.contains(y);
                    }
                    s1 += w[y] * mu[y];
                    s2 += w[y].powf(1.0 + delta) * mu[y];
                    pos += 1;
                }
                if !inside {
                    break;
                }
                let m = balls.masses(c)[k];
                let v = (s2 / m).powf(1.0 / (1.0 + delta)) / (s1 / m);
                if best.is_none_or(|(b, _)| v > b) {
                    best = Some((v, k));
                }
            }
            best
        })
        .collect();
    let mut out: Option<ReverseHolderReport> = None;
    for (c, b) in per_center.into_iter().enumerate() {
        if let Some((v, k)) = b {
            if out.is_none_or(|o| v > o.value) {
                out = Some(ReverseHolderReport { value: v, witness: Witness { center: c, prefix: k }, delta });
            }
        }
    }
    out.ok_or_else(|| Error::InvalidArgument("no ball in scope".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonRow {
    pub eps: f64,
    pub characteristic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfImprovement {
    pub eps: f64,
    pub budget: f64,
    pub table: Vec<EpsilonRow>,
}

/// Largest grid `ε` with `[w^{1+ε}]_{A_p(X)} ≤ budget`.
pub fn self_improve_epsilon(
    space: &MetricMeasureSpace,
    w: &[f64],
    p: f64,
    eps_grid: &[f64],
    budget: f64,
) -> Result<SelfImprovement> {
    let base = ap_characteristic(space, w, p)?.value;
    if base > budget {
        return Err(Error::BudgetExceededAtZero { budget, value: base });
    }
    let mut table = Vec::with_capacity(eps_grid.len());
    let mut best = 0.0f64;
    for &eps in eps_grid {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid value {eps} must be nonnegative")));
        }
        let powered: Vec<f64> = w.iter().map(|v| v.powf(1.0 + eps)).collect();
        let value = if eps == 0.0 { base } else { ap_characteristic(space, &powered, p)?.value };
        if value <= budget && eps > best {
            best = eps;
        }
        table.push(EpsilonRow { eps, characteristic: value });
    }
    Ok(SelfImprovement { eps: best, budget, table })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AInfinityRow {
    pub delta: f64,
    pub c_w: f64,
}

/// Empirical `(C_w, δ(w))` for `w(S)/w(B) ≤ C_w (μ(S)/μ(B))^δ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AInfinityReport {
    pub delta: f64,
    pub c_w: f64,
    pub violations: usize,
    pub pairs: usize,
    pub seed: u64,
    pub table: Vec<AInfinityRow>,
}

/// Samples balls `B ⊆ D` and nonempty subsets `S ⊆ B`; for each grid `δ`
/// the smallest admissible `C_w(δ)` is the largest observed quotient, so
/// every grid value is feasible. The chosen pair is the largest `δ` whose
/// `C_w` stays within `c_cap` (the smallest grid `δ` otherwise).
pub fn a_infinity_report(
    space: &MetricMeasureSpace,
    d: &Subset,
    w: &[f64],
    samples: usize,
    seed: u64,
    delta_grid: &[f64],
    c_cap: f64,
) -> Result<AInfinityReport> {
    check_len(w, space)?;
    check_weight(w, Some(d))?;
    if delta_grid.is_empty() || delta_grid.iter().any(|&g| !(g > 0.0)) {
        return Err(Error::InvalidArgument("delta grid must be nonempty and positive".into()));
    }
    let pairs = sample_subset_pairs(space, d, samples, seed)?;
    let mu = space.mu();
    let ratios: Vec<(f64, f64)> = pairs
        .iter()
        .map(|(ball, s)| {
            let wb: f64 = ball.iter().map(|&y| w[y] * mu[y]).sum();
            let mb: f64 = ball.iter().map(|&y| mu[y]).sum();
            let ws: f64 = s.iter().map(|&y| w[y] * mu[y]).sum();
            let ms: f64 = s.iter().map(|&y| mu[y]).sum();
            (ws / wb, ms / mb)
        })
        .collect();
    let table: Vec<AInfinityRow> = delta_grid
        .iter()
        .map(|&delta| AInfinityRow {
            delta,
            c_w: ratios.iter().map(|&(rw, rm)| rw / rm.powf(delta)).fold(0.0, f64::max),
        })
        .collect();
    let chosen = table
        .iter()
        .filter(|r| r.c_w <= c_cap)
        .max_by(|a, b| a.delta.total_cmp(&b.delta))
        .or_else(|| table.iter().min_by(|a, b| a.delta.total_cmp(&b.delta)))
        .cloned()
        .expect("grid is nonempty");
    let violations = ratios
        .iter()
        .filter(|&&(rw, rm)| rw > chosen.c_w * rm.powf(chosen.delta) * (1.0 + REL_TOL))
        .count();
    Ok(AInfinityReport {
        delta: chosen.delta,
        c_w: chosen.c_w,
        violations,
        pairs: ratios.len(),
        seed,
        table,
    })
}

/// Random pairs (members of a canonical ball inside `D`, nonempty subset).
pub fn sample_subset_pairs(
    space: &MetricMeasureSpace,
    d: &Subset,
    samples: usize,
    seed: u64,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let balls = space.balls()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let c = *d.ids().choose(&mut rng).expect("domain is nonempty");
        let inside = (0..balls.prefix_count(c))
            .take_while(|&k| balls.members(c, k).iter().all(|&y| d.contains(y as usize)))
            .count();
        let k = rng.gen_range(0..inside);
        let ball: Vec<usize> = balls.members(c, k).iter().map(|&y| y as usize).collect();
        let mut s: Vec<usize> = ball.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if s.is_empty() {
            s.push(*ball.choose(&mut rng).expect("balls are nonempty"));
        }
        s.sort_unstable();
        out.push((ball, s));
    }
    Ok(out)
}
