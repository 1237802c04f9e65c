//! Small statistics used by the chain reports.

/// Pearson correlation; `None` when either sample is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs[..n].iter().zip(&ys[..n]) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Smallest `α ≥ 1` with every ratio in `[1/α, α]`.
pub fn band_alpha(ratios: &[f64]) -> f64 {
    ratios.iter().fold(1.0f64, |a, &r| a.max(r).max(1.0 / r))
}

/// Smallest `β` such that `y ≤ α x + β` on every sample, for a given slope.
pub fn linear_envelope(xs: &[f64], ys: &[f64], alpha: f64) -> f64 {
    xs.iter().zip(ys).map(|(x, y)| y - alpha * x).fold(f64::NEG_INFINITY, f64::max)
}
