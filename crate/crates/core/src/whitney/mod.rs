//! Whitney covers, chains of Whitney balls and quasihyperbolic distances
//! for proper subsets `D ⊊ X`.

mod chains;
mod cover;
mod qh;
mod sampling;
mod stats;
mod witness;

pub use chains::{chain_path, chain_weight_ratio, shortest_chain_length, ChainWeightReport};
pub use cover::{check_cover_invariants, whitney_cover, CoverSummary, WhitneyBall, WhitneyCover};
pub use qh::{qh_distance, QhGraph};
pub use sampling::{
    ball_averages, chain_comparability, chain_weight_fit, near_ball_band, qh_ball_radius, sample_whitney_like,
    whitney_like_neighbours, ChainPair, ChainReport, ChainWeightFit, NearBallBand, NeighbourStats, PairSelection,
    WhitneyLikeBall,
};
pub use stats::{band_alpha, linear_envelope, pearson};
pub use witness::{witness_intersection_ball, WitnessBall};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;
use crate::subset::Subset;

/// A proper nonempty subset together with distances to its complement.
#[derive(Clone, Debug, Serialize)]
pub struct Domain {
    set: Subset,
    #[serde(skip)]
    delta: Vec<f64>,
    resolution: f64,
}

impl Domain {
    pub fn new(space: &MetricMeasureSpace, set: Subset) -> Result<Self> {
        if set.universe() != space.len() {
            return Err(Error::InvalidArgument("domain lives in a different space".into()));
        }
        let outside = set.complement().ok_or(Error::NotProper)?;
        let delta: Vec<f64> = (0..space.len())
            .into_par_iter()
            .map(|x| {
                if !set.contains(x) {
                    return 0.0;
                }
                outside.ids().iter().map(|&y| space.dist(x, y)).fold(f64::INFINITY, f64::min)
            })
            .collect();
        Ok(Domain { set, delta, resolution: space.resolution() })
    }

    pub fn set(&self) -> &Subset {
        &self.set
    }

    pub fn contains(&self, x: usize) -> bool {
        self.set.contains(x)
    }

    /// `δ(x) = min_{y ∉ D} d(x, y)`; 0 off `D`.
    pub fn boundary_distance(&self, x: usize) -> f64 {
        self.delta[x]
    }

    pub fn boundary_distances(&self) -> &[f64] {
        &self.delta
    }

    /// Smallest positive distance of the ambient space.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }
}
