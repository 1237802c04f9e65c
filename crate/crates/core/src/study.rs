//! Refinement studies: one continuous scenario followed across grid sides.

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::extension::{check_extension_condition, wolff_extend};
use crate::scenario::{boundary_power_weight, line_power_scenario, square_domain};
use crate::whitney::{
    chain_comparability, chain_weight_fit, check_cover_invariants, near_ball_band, qh_ball_radius, whitney_cover,
    whitney_like_neighbours, PairSelection, QhGraph,
};

/// Named columns of numbers; one row per refinement step (or per step and
/// grid value).
#[derive(Clone, Debug, PartialEq)]
pub struct StudyTable {
    pub scenario: String,
    pub seed: Option<u64>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

struct Row<'a>(&'a [String], &'a [f64]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl Serialize for StudyTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Row<'_>> = self.rows.iter().map(|r| Row(&self.columns, r)).collect();
        let mut st = s.serialize_struct("StudyTable", 3)?;
        st.serialize_field("scenario", &self.scenario)?;
        st.serialize_field("seed", &self.seed)?;
        st.serialize_field("rows", &rows)?;
        st.end()
    }
}

impl StudyTable {
    fn new(scenario: &str, seed: Option<u64>, columns: &[&str]) -> Self {
        StudyTable {
            scenario: scenario.into(),
            seed,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|&v| csv_number(v))).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Integers without a fraction, other values in shortest round-trip form.
fn csv_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

/// Largest quotient between consecutive entries, in either direction.
pub fn max_step_factor(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] / w[0]).max(w[0] / w[1])).fold(1.0, f64::max)
}

/// Largest growth `v[k+1]/v[k]` between consecutive entries.
pub fn max_growth(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] / w[0]).fold(f64::NEG_INFINITY, f64::max)
}

/// Extension of `|x|^a` from `[0, 1]` to `[-1, 1]` at each side.
pub fn extension_study(sides: &[usize], a: f64, p: f64, eps: f64, tol: f64) -> Result<StudyTable> {
    let mut t = StudyTable::new(
        "extension",
        None,
        &["side", "n", "ball_count", "ap_constant_W", "agreement_error", "condition_characteristic", "k_max"],
    );
    for &side in sides {
        let sc = line_power_scenario(side, a)?;
        let r = wolff_extend(&sc.space, &sc.e, &sc.w, p, eps, tol)?;
        let cond = check_extension_condition(&sc.space, &sc.e, &sc.w, p, &[eps], f64::INFINITY)?;
        t.rows.push(vec![
            side as f64,
            sc.space.len() as f64,
            sc.space.balls()?.ball_count() as f64,
            r.ap_constant_w,
            r.agreement_error,
            cond.table[0].characteristic,
            r.factorization.k_max as f64,
        ]);
    }
    Ok(t)
}

/// Induced characteristic of `w^{1+ε}` for `w = |x|^a` on `[0, 1]`, one row
/// per side and grid value.
pub fn condition_study(sides: &[usize], a: f64, p: f64, eps_grid: &[f64]) -> Result<StudyTable> {
    let mut t = StudyTable::new("condition", None, &["side", "n", "ball_count", "eps", "characteristic"]);
    for &side in sides {
        let sc = line_power_scenario(side, a)?;
        let r = check_extension_condition(&sc.space, &sc.e, &sc.w, p, eps_grid, f64::INFINITY)?;
        let balls = sc.space.balls()?.ball_count() as f64;
        for row in r.table {
            t.rows.push(vec![side as f64, sc.space.len() as f64, balls, row.eps, row.characteristic]);
        }
    }
    Ok(t)
}

/// Whitney covers of the unit square at each side.
pub fn whitney_study(sides: &[usize], seed: u64) -> Result<StudyTable> {
    let mut t = StudyTable::new(
        "whitney",
        Some(seed),
        &[
            "side",
            "n",
            "ball_count",
            "resolved",
            "overlap_N",
            "max_radius_ratio",
            "max_mass_ratio",
            "qh_ball_radius",
            "neighbour_count",
            "neighbour_radius_factor",
        ],
    );
    for &side in sides {
        let (space, domain) = square_domain(side)?;
        let cover = whitney_cover(&space, &domain)?;
        check_cover_invariants(&space, &domain, &cover)?;
        let qh = QhGraph::new(&space, &domain)?;
        let nb = whitney_like_neighbours(&space, &domain, &cover, 200, seed, CONTINUUM_MARGIN)?;
        t.rows.push(vec![
            side as f64,
            space.len() as f64,
            cover.len() as f64,
            cover.resolved_count as f64,
            cover.overlap_n as f64,
            cover.max_radius_ratio,
            cover.max_mass_ratio,
            qh_ball_radius(&space, &cover, &qh, 64)?,
            nb.max_count as f64,
            nb.max_radius_factor,
        ]);
    }
    Ok(t)
}

/// Boundary distance below which continuous samplers reject points; the
/// coarsest grids in the studies still resolve balls at this depth.
pub const CONTINUUM_MARGIN: f64 = 0.1;

/// Boundary distance of the centers in the near-ball comparison; balls there
/// are resolved on the coarsest grids of the studies.
pub const NEAR_BALL_MARGIN: f64 = 0.25;

/// Chain statistics of the unit square at each side, with `w = δ^a`.
/// Chain comparability uses every pair of resolved balls.
pub fn chain_study(sides: &[usize], pairs: usize, seed: u64, a: f64) -> Result<StudyTable> {
    let mut t = StudyTable::new(
        "chains",
        Some(seed),
        &[
            "side",
            "n",
            "ball_count",
            "resolved",
            "pairs",
            "correlation",
            "alpha",
            "weight_alpha",
            "weight_beta",
            "heldout_violations",
            "near_pairs",
            "near_alpha",
        ],
    );
    for &side in sides {
        let (space, domain) = square_domain(side)?;
        let cover = whitney_cover(&space, &domain)?;
        let qh = QhGraph::new(&space, &domain)?;
        let chains = chain_comparability(&space, &cover, &qh, PairSelection::All)?;
        let w = boundary_power_weight(&domain, a);
        let fit = chain_weight_fit(&space, &cover, &w, pairs, seed)?;
        let near = near_ball_band(&space, &domain, &qh, &w, pairs, seed.wrapping_add(1), 1.0, NEAR_BALL_MARGIN)?;
        t.rows.push(vec![
            side as f64,
            space.len() as f64,
            cover.len() as f64,
            cover.resolved_count as f64,
            chains.pair_count as f64,
            chains.correlation.unwrap_or(0.0),
            chains.alpha,
            fit.alpha,
            fit.beta,
            fit.heldout_violations as f64,
            near.pairs as f64,
            near.alpha,
        ]);
    }
    Ok(t)
}
