//! Hardy–Littlewood maximal operators and the Coifman–Rochberg A₁ builder.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;
use crate::subset::{check_len, check_weight, Subset};
use crate::weights::{ap_tilde_characteristic, CharacteristicReport};

/// Maximal function at every point of `X`.
///
/// Without `subset` this is `Mf`; with a subset `E` it is `m_E f`, where
/// `|f|` is integrated over `B ∩ E` but normalized by `μ(B)`. With a
/// `radius_cap`, only canonical balls whose representative radius is at
/// most the cap take part. The supremum ranges over every ball that
/// contains the evaluation point, whatever its center.
pub fn maximal_fn(
    space: &MetricMeasureSpace,
    f: &[f64],
    subset: Option<&Subset>,
    radius_cap: Option<f64>,
) -> Result<Vec<f64>> {
    check_len(f, space)?;
    if let Some(e) = subset {
        e.check_space(space)?;
    }
    if let Some(cap) = radius_cap {
        if !(cap > 0.0) {
            return Err(Error::InvalidArgument(format!("radius cap must be positive, got {cap}")));
        }
    }
    let n = space.len();
    let balls = space.balls()?;
    let mu = space.mu();
    let g: Vec<f64> = match subset {
        Some(e) => (0..n).map(|i| if e.contains(i) { f[i].abs() } else { 0.0 }).collect(),
        None => f.iter().map(|v| v.abs()).collect(),
    };
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("function value".into()));
    }

    let out = (0..n)
        .into_par_iter()
        .fold(
            || vec![0.0f64; n],
            |mut acc, c| {
                let order = balls.order(c);
                let ends = balls.ends(c);
                let masses = balls.masses(c);
                let radii = balls.radii(c);
                let m = ends.len();
                let mut avg = vec![f64::NEG_INFINITY; m];
                let mut s = 0.0;
                let mut pos = 0usize;
                for k in 0..m {
                    let end = ends[k] as usize;
                    while pos < end {
                        let y = order[pos] as usize;
                        s += g[y] * mu[y];
                        pos += 1;
                    }
                    if radius_cap.is_none_or(|cap| radii[k] <= cap) {
                        avg[k] = s / masses[k];
                    }
                }
                for k in (0..m.saturating_sub(1)).rev() {
                    avg[k] = avg[k].max(avg[k + 1]);
                }
                for (y, slot) in acc.iter_mut().enumerate() {
                    let v = avg[balls.group_of(c, y)];
                    if v > *slot {
                        *slot = v;
                    }
                }
                acc
            },
        )
        .reduce(|| vec![0.0f64; n], |a, b| a.into_iter().zip(b).map(|(x, y)| x.max(y)).collect());
    Ok(out)
}

/// Output of [`coifman_rochberg_weight`].
#[derive(Clone, Debug)]
pub struct CoifmanRochberg {
    pub weight: Vec<f64>,
    pub a1: CharacteristicReport,
}

/// `w = g · (Mf)^ε` together with its A₁(X) characteristic.
pub fn coifman_rochberg_weight(
    space: &MetricMeasureSpace,
    f: &[f64],
    eps: f64,
    g: &[f64],
) -> Result<CoifmanRochberg> {
    check_len(f, space)?;
    check_len(g, space)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::ExponentRange(eps));
    }
    if let Some(i) = f.iter().position(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("f must be finite and nonnegative (point {i})")));
    }
    if let Some(i) = g.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::NonpositiveG(i));
    }
    let mf = maximal_fn(space, f, None, None)?;
    if mf.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroFunction);
    }
    let weight: Vec<f64> = mf.iter().zip(g).map(|(&m, &gi)| gi * m.powf(eps)).collect();
    let full = Subset::full(space.len());
    let a1 = ap_tilde_characteristic(space, &full, &weight, 1.0)?;
    Ok(CoifmanRochberg { weight, a1 })
}

fn weighted_power_sum(space: &MetricMeasureSpace, e: &Subset, v: &[f64], f: &[f64], q: f64) -> f64 {
    let mu = space.mu();
    e.ids().iter().map(|&i| f[i].abs().powf(q) * v[i] * mu[i]).sum()
}

/// Smallest `C` with `v({x ∈ E : m_E f(x) > t}) ≤ C t^{-q} Σ_E |f|^q v μ`
/// for every `t > 0`.
///
/// The level-set measure only changes at values of `m_E f`, so the supremum
/// over `t` is attained as `t` rises to one of them.
pub fn weak_type_constant(space: &MetricMeasureSpace, e: &Subset, v: &[f64], f: &[f64], q: f64) -> Result<f64> {
    check_len(v, space)?;
    check_len(f, space)?;
    check_weight(v, Some(e))?;
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::ExponentRange(q));
    }
    let rhs = weighted_power_sum(space, e, v, f, q);
    if rhs == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let m = maximal_fn(space, f, Some(e), None)?;
    let mu = space.mu();
    let mut pts: Vec<usize> = e.ids().to_vec();
    pts.sort_by(|&a, &b| m[b].total_cmp(&m[a]).then(a.cmp(&b)));
    let mut mass = 0.0;
    let mut best = 0.0f64;
    for (k, &i) in pts.iter().enumerate() {
        mass += v[i] * mu[i];
        let last_of_level = pts.get(k + 1).is_none_or(|&j| m[j] < m[i]);
        if last_of_level {
            best = best.max(m[i].powf(q) * mass / rhs);
        }
    }
    Ok(best)
}

/// `Σ_E (m_E f)^p v μ / Σ_E |f|^p v μ`.
pub fn strong_type_ratio(space: &MetricMeasureSpace, e: &Subset, v: &[f64], f: &[f64], p: f64) -> Result<f64> {
    check_len(v, space)?;
    check_len(f, space)?;
    check_weight(v, Some(e))?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::ExponentRange(p));
    }
    let rhs = weighted_power_sum(space, e, v, f, p);
    if rhs == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let m = maximal_fn(space, f, Some(e), None)?;
    Ok(weighted_power_sum(space, e, v, &m, p) / rhs)
}
