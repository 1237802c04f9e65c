//! Whitney chains against quasihyperbolic distance on the unit square, and a
//! fitted bound for how much a weight's averages can change along a chain.

use muckenhoupt::scenario::{boundary_power_weight, square_domain};
use muckenhoupt::whitney::{chain_comparability, chain_path, chain_weight_fit, whitney_cover, PairSelection, QhGraph};

fn main() -> muckenhoupt::Result<()> {
    let (s, d) = square_domain(48)?;
    let cover = whitney_cover(&s, &d)?;
    let qh = QhGraph::new(&s, &d)?;

    let report = chain_comparability(&s, &cover, &qh, PairSelection::Sample { pairs: 200, seed: 1 })?;
    println!(
        "{} pairs: correlation {:.3}, chain/qh ratios within [1/{a:.2}, {a:.2}]",
        report.pair_count,
        report.correlation.unwrap_or(f64::NAN),
        a = report.alpha
    );
    if let Some(p) = report.pairs.first() {
        println!("chain between balls {} and {}: {:?}", p.i, p.j, chain_path(&cover, p.i, p.j)?);
    }

    let w = boundary_power_weight(&d, 0.3);
    let fit = chain_weight_fit(&s, &cover, &w, 200, 1)?;
    println!(
        "log of average ratio <= {:.3} k + {:.3}; {} of {} held-out pairs violate it",
        fit.alpha, fit.beta, fit.heldout_violations, fit.heldout_pairs
    );
    Ok(())
}
