//! Splits an A_p weight as v = v1 · v2^(1-p) with both factors in A1.

use muckenhoupt::factorization::{jones_factorize, DEFAULT_TOL};
use muckenhoupt::maximal::maximal_fn;
use muckenhoupt::scenario::line_power_scenario;

fn main() -> muckenhoupt::Result<()> {
    let sc = line_power_scenario(65, 0.5)?;
    for p in [1.5, 2.0, 3.0] {
        let r = jones_factorize(&sc.space, &sc.e, &sc.w, p, DEFAULT_TOL)?;
        let m1 = maximal_fn(&sc.space, &r.v1, Some(&sc.e), None)?;
        let ratio = sc.e.ids().iter().map(|&x| m1[x] / r.v1[x]).fold(0.0, f64::max);
        println!(
            "p = {p}: {:?} branch, c = {:.4}, {} terms, residual {:.1e}, max m_E v1 / v1 = {ratio:.4}",
            r.branch,
            r.c.unwrap(),
            r.k_max,
            r.residual
        );
    }
    Ok(())
}
