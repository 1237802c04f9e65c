//! Discretizations of fixed continuous scenarios, so that a quantity can be
//! followed along a refinement family.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{build_grid_space, MetricMeasureSpace};
use crate::subset::Subset;
use crate::whitney::Domain;

/// `X` = uniform grid on `[-1, 1]`, `E = X ∩ [0, 1]`, `w = |x|^a` with the
/// origin clamped to `(h/2)^a`.
#[derive(Clone, Debug)]
pub struct LineScenario {
    pub space: MetricMeasureSpace,
    pub e: Subset,
    pub w: Vec<f64>,
    pub coords: Vec<f64>,
}

pub fn line_power_scenario(side: usize, a: f64) -> Result<LineScenario> {
    if side < 2 {
        return Err(Error::InvalidArgument("side must be at least 2".into()));
    }
    let h = 2.0 / (side - 1) as f64;
    let space = build_grid_space(1, side, h)?.with_meta(format!("line [-1,1] side={side} weight=|x|^{a}"));
    let coords: Vec<f64> = (0..side).map(|i| -1.0 + i as f64 * h).collect();
    let w = coords.iter().map(|&x| power_weight(x, h, a)).collect();
    let e = Subset::new(side, (0..side).filter(|&i| 2 * i + 1 >= side).collect())?;
    Ok(LineScenario { space, e, w, coords })
}

/// `|x|^a`, with values below `h/2` in modulus clamped to `(h/2)^a`.
pub fn power_weight(x: f64, h: f64, a: f64) -> f64 {
    x.abs().max(h / 2.0).powf(a)
}

/// Grid on `[0, 1]^dim` with `side` points per axis and spacing `1/(side-1)`.
pub fn unit_cube(dim: usize, side: usize) -> Result<MetricMeasureSpace> {
    if side < 3 {
        return Err(Error::InvalidArgument("side must be at least 3".into()));
    }
    build_grid_space(dim, side, 1.0 / (side - 1) as f64)
}

/// Coordinates of a lattice point in the unit cube.
pub fn lattice_coords(space: &MetricMeasureSpace, x: usize) -> Vec<f64> {
    let l = space.lattice().expect("lattice space");
    let c = l.cell(x);
    (0..l.dim).map(|k| c[k] as f64 * l.spacing).collect()
}

/// Nearest lattice point to a point of the unit cube.
pub fn nearest_point(space: &MetricMeasureSpace, u: &[f64]) -> usize {
    let l = space.lattice().expect("lattice space");
    let mut c = [0i64; 3];
    for (k, &t) in u.iter().enumerate().take(l.dim) {
        c[k] = ((t / l.spacing).round() as i64).clamp(0, l.side as i64 - 1);
    }
    l.index(c).expect("clamped into range")
}

/// The open unit square `(0, 1)²` discretized: the interior lattice points.
pub fn square_domain(side: usize) -> Result<(MetricMeasureSpace, Domain)> {
    let space = unit_cube(2, side)?.with_meta(format!("unit square side={side}"));
    let ids = (0..side * side)
        .filter(|&i| {
            let (x, y) = (i % side, i / side);
            x > 0 && y > 0 && x + 1 < side && y + 1 < side
        })
        .collect();
    let domain = Domain::new(&space, Subset::new(side * side, ids)?)?;
    Ok((space, domain))
}

/// `δ^a` on the domain and 0 elsewhere.
pub fn boundary_power_weight(domain: &Domain, a: f64) -> Vec<f64> {
    domain.boundary_distances().iter().map(|&d| if d > 0.0 { d.powf(a) } else { 0.0 }).collect()
}

/// A union of open axis-parallel boxes inside `(0, 1)^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxUnion {
    pub dim: usize,
    pub boxes: Vec<Vec<(f64, f64)>>,
}

impl BoxUnion {
    /// One to three boxes with sides at least `0.2`, kept inside `[0.05, 0.95]`.
    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = rng.gen_range(1..=3);
        let boxes = (0..count)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let len = rng.gen_range(0.2..0.6);
                        let lo = rng.gen_range(0.05..0.95 - len);
                        (lo, lo + len)
                    })
                    .collect()
            })
            .collect();
        BoxUnion { dim, boxes }
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        self.boxes.iter().any(|b| b.iter().zip(u).all(|(&(lo, hi), &t)| lo < t && t < hi))
    }

    pub fn discretize(&self, side: usize) -> Result<(MetricMeasureSpace, Domain)> {
        let space = unit_cube(self.dim, side)?.with_meta(format!("box union dim={} side={side}", self.dim));
        let ids: Vec<usize> = (0..space.len()).filter(|&x| self.contains(&lattice_coords(&space, x))).collect();
        let domain = Domain::new(&space, Subset::new(space.len(), ids)?)?;
        Ok((space, domain))
    }
}
