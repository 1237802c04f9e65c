//! Rubio de Francia iteration and the factorization `v = v₁ v₂^{1-p}` with
//! both factors in the induced A₁ class of `E`.
//!
//! For `p ≥ 2` the operator
//! `T f = (v^{-1/p} m_E(v^{1/p} f^{p-1}))^{1/(p-1)} + v^{1/p} m_E(v^{-1/p} f)`
//! is sublinear and homogeneous of degree one. With `c` an estimate of its
//! norm on `L^p(E)`, `η = Σ_{k≥1} (2c)^{-k} T^k 1` satisfies `Tη ≤ 2cη`, and
//! `v₁ = v^{1/p} η^{p-1}`, `v₂ = v^{-1/p} η` do the job. For `1 < p < 2` the
//! same construction runs on `v^{1-p'}` at the conjugate exponent.
//!
//! Vectors are full length over `X`; entries off `E` are 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maximal::maximal_fn;
use crate::space::{MetricMeasureSpace, REL_TOL};
use crate::subset::{check_len, check_weight, Subset};
use crate::weights::conjugate;

/// Default truncation tolerance for the series defining `η`.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_DOUBLINGS: usize = 10;
const MAX_NORM_ITERATIONS: usize = 100;
const MAX_SERIES_TERMS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    #[serde(rename = "p>=2")]
    Large,
    #[serde(rename = "1<p<2")]
    Small,
    #[serde(rename = "p=1")]
    One,
}

/// Observed and guaranteed constants of `m_E v_i ≤ K_i v_i` on `E`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FactorBounds {
    pub v1_ratio: f64,
    pub v1_bound: f64,
    pub v2_ratio: f64,
    pub v2_bound: f64,
    /// `max_E Tη / η` for the operator actually iterated.
    pub t_eta_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationResult {
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub eta: Vec<f64>,
    /// Constant for which `m_E v₁ ≤ (2c)^{p-1} v₁` and `m_E v₂ ≤ 2c v₂`.
    pub c: Option<f64>,
    /// Norm estimate of the operator that was iterated (at `p'` when `p < 2`).
    pub operator_c: Option<f64>,
    pub k_max: usize,
    pub doublings: usize,
    pub residual: f64,
    pub branch: Branch,
    pub p: f64,
    /// Successive `‖T g‖_p / ‖g‖_p` values of the norm estimation.
    pub trace: Vec<f64>,
    pub bounds: Option<FactorBounds>,
}

fn check_e(space: &MetricMeasureSpace, e: &Subset) -> Result<()> {
    e.check_space(space)?;
    if e.mass(space) <= 0.0 {
        return Err(Error::EmptySubset);
    }
    Ok(())
}

/// One application of `T`; requires `p ≥ 2`.
pub fn rdf_apply_t(
    space: &MetricMeasureSpace,
    e: &Subset,
    v: &[f64],
    p: f64,
    f: &[f64],
) -> Result<Vec<f64>> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::ExponentRange(p));
    }
    check_e(space, e)?;
    check_len(v, space)?;
    check_len(f, space)?;
    check_weight(v, Some(e))?;
    if let Some(&i) = e.ids().iter().find(|&&i| !(f[i] >= 0.0 && f[i].is_finite())) {
        return Err(Error::InvalidArgument(format!("f must be finite and nonnegative (point {i})")));
    }
    apply_t(space, e, v, p, f)
}

fn apply_t(space: &MetricMeasureSpace, e: &Subset, v: &[f64], p: f64, f: &[f64]) -> Result<Vec<f64>> {
    let n = space.len();
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    for &i in e.ids() {
        let s = v[i].powf(1.0 / p);
        a[i] = s * f[i].powf(p - 1.0);
        b[i] = f[i] / s;
    }
    let ma = maximal_fn(space, &a, Some(e), None)?;
    let mb = maximal_fn(space, &b, Some(e), None)?;
    let mut out = vec![0.0; n];
    for &i in e.ids() {
        let s = v[i].powf(1.0 / p);
        out[i] = (ma[i] / s).powf(1.0 / (p - 1.0)) + s * mb[i];
    }
    Ok(out)
}

fn lp_norm(space: &MetricMeasureSpace, e: &Subset, f: &[f64], p: f64) -> f64 {
    let mu = space.mu();
    e.ids().iter().map(|&i| f[i].powf(p) * mu[i]).sum::<f64>().powf(1.0 / p)
}

fn sup_on(e: &Subset, f: &[f64]) -> f64 {
    e.ids().iter().map(|&i| f[i]).fold(0.0, f64::max)
}

/// Largest observed `‖T g‖_p / ‖g‖_p` along the normalized orbit of `1_E`.
fn estimate_norm(space: &MetricMeasureSpace, e: &Subset, v: &[f64], p: f64) -> Result<(f64, Vec<f64>)> {
    let mut g = e.mask_values(&vec![1.0; space.len()]);
    let norm = lp_norm(space, e, &g, p);
    g.iter_mut().for_each(|x| *x /= norm);
    let mut trace = Vec::new();
    let mut best = 0.0f64;
    for _ in 0..MAX_NORM_ITERATIONS {
        let tg = apply_t(space, e, v, p, &g)?;
        let ratio = lp_norm(space, e, &tg, p);
        best = best.max(ratio);
        let settled = trace.last().is_some_and(|&prev: &f64| (ratio - prev).abs() <= REL_TOL * ratio);
        trace.push(ratio);
        if settled {
            break;
        }
        g = tg.into_iter().map(|x| x / ratio).collect();
    }
    Ok((best, trace))
}

struct Series {
    eta: Vec<f64>,
    t_eta: Vec<f64>,
    terms: usize,
}

/// `η = Σ_{k≥1} (2c)^{-k} T^k 1_E`, kept as scaled terms so nothing overflows.
fn build_series(
    space: &MetricMeasureSpace,
    e: &Subset,
    v: &[f64],
    p: f64,
    c: f64,
    tol: f64,
) -> Result<Option<Series>> {
    let mut term = e.mask_values(&vec![1.0; space.len()]);
    let mut eta = vec![0.0; space.len()];
    let mut terms = 0usize;
    loop {
        let next: Vec<f64> = apply_t(space, e, v, p, &term)?.into_iter().map(|x| x / (2.0 * c)).collect();
        if terms > 0 && sup_on(e, &next) < tol * sup_on(e, &eta) {
            break;
        }
        if terms == MAX_SERIES_TERMS || next.iter().any(|x| !x.is_finite()) {
            return Ok(None);
        }
        for &i in e.ids() {
            eta[i] += next[i];
        }
        terms += 1;
        term = next;
    }
    let t_eta = apply_t(space, e, v, p, &eta)?;
    let holds = e.ids().iter().all(|&i| t_eta[i] <= 2.0 * c * eta[i] * (1.0 + REL_TOL));
    Ok(holds.then_some(Series { eta, t_eta, terms }))
}

struct Core {
    f1: Vec<f64>,
    f2: Vec<f64>,
    eta: Vec<f64>,
    c: f64,
    terms: usize,
    doublings: usize,
    trace: Vec<f64>,
    t_eta_ratio: f64,
}

/// The `p ≥ 2` construction.
fn factorize_large(space: &MetricMeasureSpace, e: &Subset, v: &[f64], p: f64, tol: f64) -> Result<Core> {
    let (c_hat, trace) = estimate_norm(space, e, v, p)?;
    let mut c = c_hat;
    for doublings in 0..=MAX_DOUBLINGS {
        if let Some(s) = build_series(space, e, v, p, c, tol)? {
            let n = space.len();
            let (mut f1, mut f2) = (vec![0.0; n], vec![0.0; n]);
            for &i in e.ids() {
                let r = v[i].powf(1.0 / p);
                f1[i] = r * s.eta[i].powf(p - 1.0);
                f2[i] = s.eta[i] / r;
            }
            let t_eta_ratio = e.ids().iter().map(|&i| s.t_eta[i] / s.eta[i]).fold(0.0, f64::max);
            return Ok(Core { f1, f2, eta: s.eta, c, terms: s.terms, doublings, trace, t_eta_ratio });
        }
        c *= 2.0;
    }
    Err(Error::NoConvergence { doublings: MAX_DOUBLINGS })
}

fn a1_ratio(space: &MetricMeasureSpace, e: &Subset, u: &[f64]) -> Result<f64> {
    let m = maximal_fn(space, u, Some(e), None)?;
    Ok(e.ids().iter().map(|&i| m[i] / u[i]).fold(0.0, f64::max))
}

fn residual(e: &Subset, v: &[f64], v1: &[f64], v2: &[f64], p: f64) -> f64 {
    e.ids()
        .iter()
        .map(|&i| (v1[i] * v2[i].powf(1.0 - p) / v[i] - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Jones factorization of `v` on `E`.
pub fn jones_factorize(
    space: &MetricMeasureSpace,
    e: &Subset,
    v: &[f64],
    p: f64,
    tol: f64,
) -> Result<FactorizationResult> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::ExponentRange(p));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    check_e(space, e)?;
    check_len(v, space)?;
    check_weight(v, Some(e))?;

    if p == 1.0 {
        let v1 = e.mask_values(v);
        let ones = e.mask_values(&vec![1.0; space.len()]);
        return Ok(FactorizationResult {
            v1,
            v2: ones.clone(),
            eta: ones,
            c: None,
            operator_c: None,
            k_max: 0,
            doublings: 0,
            residual: 0.0,
            branch: Branch::One,
            p,
            trace: Vec::new(),
            bounds: None,
        });
    }

    let (branch, core, v1, v2, c) = if p >= 2.0 {
        let core = factorize_large(space, e, v, p, tol)?;
        let (v1, v2) = (core.f1.clone(), core.f2.clone());
        let c = core.c;
        (Branch::Large, core, v1, v2, c)
    } else {
        let pc = conjugate(p);
        let u: Vec<f64> = (0..space.len())
            .map(|i| if e.contains(i) { v[i].powf(1.0 - pc) } else { 0.0 })
            .collect();
        let core = factorize_large(space, e, &u, pc, tol)?;
        let (v1, v2) = (core.f2.clone(), core.f1.clone());
        let c = (2.0 * core.c).powf(1.0 / (p - 1.0)) / 2.0;
        (Branch::Small, core, v1, v2, c)
    };

    let bounds = FactorBounds {
        v1_ratio: a1_ratio(space, e, &v1)?,
        v1_bound: (2.0 * c).powf(p - 1.0),
        v2_ratio: a1_ratio(space, e, &v2)?,
        v2_bound: 2.0 * c,
        t_eta_ratio: core.t_eta_ratio,
    };
    Ok(FactorizationResult {
        residual: residual(e, v, &v1, &v2, p),
        v1,
        v2,
        eta: core.eta,
        c: Some(c),
        operator_c: Some(core.c),
        k_max: core.terms,
        doublings: core.doublings,
        branch,
        p,
        trace: core.trace,
        bounds: Some(bounds),
    })
}
