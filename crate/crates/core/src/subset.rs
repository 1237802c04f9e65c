//! Point subsets `E ⊆ X` and helpers for functions defined on them.
//!
//! Functions and weights are stored as full-length vectors over `X`; a
//! function "on E" simply has its values outside `E` ignored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SubsetRepr", into = "SubsetRepr")]
pub struct Subset {
    n: usize,
    ids: Vec<usize>,
    mask: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct SubsetRepr {
    n: usize,
    ids: Vec<usize>,
}

impl TryFrom<SubsetRepr> for Subset {
    type Error = Error;
    fn try_from(r: SubsetRepr) -> Result<Self> {
        Subset::new(r.n, r.ids)
    }
}

impl From<Subset> for SubsetRepr {
    fn from(s: Subset) -> Self {
        SubsetRepr { n: s.n, ids: s.ids }
    }
}

impl Subset {
    /// Subset of `0..n`; ids are sorted and deduplicated.
    pub fn new(n: usize, mut ids: Vec<usize>) -> Result<Self> {
        ids.sort_unstable();
        ids.dedup();
        if ids.is_empty() {
            return Err(Error::EmptySubset);
        }
        if let Some(&bad) = ids.iter().find(|&&i| i >= n) {
            return Err(Error::PointOutOfRange(bad));
        }
        let mut mask = vec![false; n];
        for &i in &ids {
            mask[i] = true;
        }
        Ok(Subset { n, ids, mask })
    }

    pub fn from_mask(mask: Vec<bool>) -> Result<Self> {
        let ids: Vec<usize> = mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect();
        if ids.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(Subset { n: mask.len(), ids, mask })
    }

    pub fn full(n: usize) -> Self {
        Subset { n, ids: (0..n).collect(), mask: vec![true; n] }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.ids.len() == self.n
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.mask[x]
    }

    /// Complement in `0..n`; `None` when this subset is everything.
    pub fn complement(&self) -> Option<Subset> {
        Subset::from_mask(self.mask.iter().map(|m| !m).collect()).ok()
    }

    pub fn mass(&self, space: &MetricMeasureSpace) -> f64 {
        self.ids.iter().map(|&i| space.mu()[i]).sum()
    }

    pub(crate) fn check_space(&self, space: &MetricMeasureSpace) -> Result<()> {
        if self.n != space.len() {
            return Err(Error::InvalidArgument(format!(
                "subset lives in a space of {} points, not {}",
                self.n,
                space.len()
            )));
        }
        Ok(())
    }

    /// Values on the subset, in id order.
    pub fn restrict(&self, values: &[f64]) -> Vec<f64> {
        self.ids.iter().map(|&i| values[i]).collect()
    }

    /// Full-length vector equal to `values` (given in id order) on the
    /// subset and `fill` elsewhere.
    pub fn extend(&self, values: &[f64], fill: f64) -> Result<Vec<f64>> {
        if values.len() != self.ids.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values on the subset, got {}",
                self.ids.len(),
                values.len()
            )));
        }
        let mut out = vec![fill; self.n];
        for (&i, &v) in self.ids.iter().zip(values) {
            out[i] = v;
        }
        Ok(out)
    }

    /// Zero outside the subset.
    pub fn mask_values(&self, values: &[f64]) -> Vec<f64> {
        values.iter().zip(&self.mask).map(|(&v, &m)| if m { v } else { 0.0 }).collect()
    }
}

/// Fails with the first point of `domain` (or of the space) where `w` is
/// not a finite positive number.
pub fn check_weight(w: &[f64], domain: Option<&Subset>) -> Result<()> {
    let bad = |i: usize| !(w[i].is_finite() && w[i] > 0.0);
    match domain {
        Some(d) => {
            if let Some(&i) = d.ids().iter().find(|&&i| bad(i)) {
                return Err(Error::NonpositiveWeight(i));
            }
        }
        None => {
            if let Some(i) = (0..w.len()).find(|&i| bad(i)) {
                return Err(Error::NonpositiveWeight(i));
            }
        }
    }
    Ok(())
}

pub(crate) fn check_len(values: &[f64], space: &MetricMeasureSpace) -> Result<()> {
    if values.len() != space.len() {
        return Err(Error::InvalidArgument(format!(
            "function has {} values but the space has {} points",
            values.len(),
            space.len()
        )));
    }
    Ok(())
}
