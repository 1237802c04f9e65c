//! Extension of induced weights on `E` to Muckenhoupt weights on `X`.
//!
//! Given `w` on `E` and `ε > 0`, put `v = w^{1+ε/2}` and `δ = 1/(1+ε/2)`,
//! factor `v = v₁ v₂^{1-p}`, and set
//!
//! ```text
//! V_i = (M(χ_E v_i))^δ          on X
//! g_i = v_i / m_E v_i on E,  1 off E
//! g   = g₁^δ g₂^{δ(1-p)}
//! W   = g V₁ V₂^{1-p}
//! ```
//!
//! On `E` the `m_E v_i` factors cancel and `W = (v₁ v₂^{1-p})^δ = w`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorization::{jones_factorize, FactorizationResult};
use crate::maximal::maximal_fn;
use crate::space::MetricMeasureSpace;
use crate::subset::{check_len, check_weight, Subset};
use crate::weights::{
    ap_characteristic, ap_tilde_characteristic, characteristic_table, EpsilonRow, Scope, Witness,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GFactor {
    pub values: Vec<f64>,
    /// Induced A₁ constant `K_i` of `v_i`.
    pub a1_constant: f64,
    pub min_on_e: f64,
    pub max_on_e: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtensionReport {
    #[serde(rename = "W")]
    pub w_ext: Vec<f64>,
    pub agreement_error: f64,
    #[serde(rename = "ap_constant_W")]
    pub ap_constant_w: f64,
    pub p: f64,
    pub eps: f64,
    pub delta: f64,
    pub g: Vec<f64>,
    pub g1: GFactor,
    pub g2: Option<GFactor>,
    pub factorization: FactorizationResult,
}

fn g_factor(space: &MetricMeasureSpace, e: &Subset, v: &[f64]) -> Result<(GFactor, Vec<f64>)> {
    let m = maximal_fn(space, v, Some(e), None)?;
    let values: Vec<f64> = (0..space.len()).map(|i| if e.contains(i) { v[i] / m[i] } else { 1.0 }).collect();
    let a1_constant = ap_tilde_characteristic(space, e, v, 1.0)?.value;
    let on_e = || e.ids().iter().map(|&i| values[i]);
    let min_on_e = on_e().fold(f64::INFINITY, f64::min);
    let max_on_e = on_e().fold(0.0, f64::max);
    Ok((GFactor { values, a1_constant, min_on_e, max_on_e }, m))
}

/// Builds `W` on `X` with `W = w` on `E`.
pub fn wolff_extend(
    space: &MetricMeasureSpace,
    e: &Subset,
    w: &[f64],
    p: f64,
    eps: f64,
    tol: f64,
) -> Result<ExtensionReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::ExponentRange(eps));
    }
    check_len(w, space)?;
    check_weight(w, Some(e))?;
    let n = space.len();
    let delta = 1.0 / (1.0 + eps / 2.0);
    let v: Vec<f64> = (0..n).map(|i| if e.contains(i) { w[i].powf(1.0 + eps / 2.0) } else { 0.0 }).collect();
    let factorization = jones_factorize(space, e, &v, p, tol)?;

    let (g1, m1) = g_factor(space, e, &factorization.v1)?;
    let (g, w_ext, g2) = if p == 1.0 {
        let g: Vec<f64> = g1.values.iter().map(|x| x.powf(delta)).collect();
        let w_ext: Vec<f64> = (0..n).map(|i| g[i] * m1[i].powf(delta)).collect();
        (g, w_ext, None)
    } else {
        let (g2, m2) = g_factor(space, e, &factorization.v2)?;
        let g: Vec<f64> = (0..n)
            .map(|i| g1.values[i].powf(delta) * g2.values[i].powf(delta * (1.0 - p)))
            .collect();
        let w_ext: Vec<f64> =
            (0..n).map(|i| g[i] * m1[i].powf(delta) * m2[i].powf(delta * (1.0 - p))).collect();
        (g, w_ext, Some(g2))
    };
    check_weight(&w_ext, None)?;
    let agreement_error = e.ids().iter().map(|&i| (w_ext[i] / w[i] - 1.0).abs()).fold(0.0, f64::max);
    let ap_constant_w = ap_characteristic(space, &w_ext, p)?.value;
    Ok(ExtensionReport {
        w_ext,
        agreement_error,
        ap_constant_w,
        p,
        eps,
        delta,
        g,
        g1,
        g2,
        factorization,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub best_eps: Option<f64>,
    pub budget: f64,
    pub p: f64,
    pub table: Vec<EpsilonRow>,
}

/// Induced characteristic of `w^{1+ε}` for each grid `ε`, and the largest
/// `ε` whose value is within `budget`.
pub fn check_extension_condition(
    space: &MetricMeasureSpace,
    e: &Subset,
    w: &[f64],
    p: f64,
    eps_grid: &[f64],
    budget: f64,
) -> Result<ConditionReport> {
    check_len(w, space)?;
    check_weight(w, Some(e))?;
    let mut table = Vec::with_capacity(eps_grid.len());
    let mut best_eps: Option<f64> = None;
    for &eps in eps_grid {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid value {eps} must be nonnegative")));
        }
        let powered: Vec<f64> =
            (0..space.len()).map(|i| if e.contains(i) { w[i].powf(1.0 + eps) } else { 0.0 }).collect();
        let characteristic = ap_tilde_characteristic(space, e, &powered, p)?.value;
        if characteristic <= budget && best_eps.is_none_or(|b| eps > b) {
            best_eps = Some(eps);
        }
        table.push(EpsilonRow { eps, characteristic });
    }
    Ok(ConditionReport { best_eps, budget, p, table })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictionReport {
    /// Largest ball-wise quotient of the induced functional by the global one.
    pub max_ratio: f64,
    pub witness: Witness,
    pub tilde_characteristic: f64,
    pub global_characteristic: f64,
    pub p: f64,
    pub eps: f64,
}

/// Compares, ball by ball, the induced functional of `W^{1+ε}` on `E` with
/// the global functional of `W^{1+ε}`.
pub fn restrict_weight_report(
    space: &MetricMeasureSpace,
    e: &Subset,
    w: &[f64],
    p: f64,
    eps: f64,
) -> Result<RestrictionReport> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::ExponentRange(eps));
    }
    check_len(w, space)?;
    check_weight(w, None)?;
    e.check_space(space)?;
    let u: Vec<f64> = w.iter().map(|x| x.powf(1.0 + eps)).collect();
    let global = characteristic_table(space, None, &u, p, Scope::All)?;
    let local = characteristic_table(space, Some(e), &u, p, Scope::All)?;
    let mut max_ratio = 0.0f64;
    let mut witness = Witness { center: 0, prefix: 0 };
    let mut tilde = 0.0f64;
    let mut gi = global.iter();
    for row in &local {
        let g = loop {
            let g = gi.next().expect("local balls are a subset of global balls");
            if (g.center, g.prefix) == (row.center, row.prefix) {
                break g;
            }
        };
        let ratio = row.value / g.value;
        if ratio > max_ratio {
            max_ratio = ratio;
            witness = Witness { center: row.center, prefix: row.prefix };
        }
        tilde = tilde.max(row.value);
    }
    let global_characteristic = global.iter().map(|r| r.value).fold(0.0, f64::max);
    Ok(RestrictionReport {
        max_ratio,
        witness,
        tilde_characteristic: tilde,
        global_characteristic,
        p,
        eps,
    })
}
