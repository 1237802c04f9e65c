//! A_p characteristics of a power weight: global, induced on a subset, and
//! on an open domain, plus reverse Hölder and self-improvement.

use muckenhoupt::scenario::line_power_scenario;
use muckenhoupt::weights::{
    ap_characteristic, ap_domain_characteristic, ap_tilde_characteristic, reverse_holder_constant,
    self_improve_epsilon, Scope,
};

fn main() -> muckenhoupt::Result<()> {
    let sc = line_power_scenario(101, 0.5)?;
    let (s, e, w) = (&sc.space, &sc.e, &sc.w);

    for p in [1.0, 1.5, 2.0, 3.0] {
        let global = ap_characteristic(s, w, p)?;
        let induced = ap_tilde_characteristic(s, e, w, p)?;
        let domain = ap_domain_characteristic(s, e, w, p)?;
        println!(
            "p = {p}: global {:.4}, induced {:.4}, domain {:.4} (worst ball centered at x = {:.2})",
            global.value, induced.value, domain.value, sc.coords[global.witness.center]
        );
    }

    let rh = reverse_holder_constant(s, w, 0.5, Scope::All)?;
    println!("reverse Hölder with exponent 1.5: {:.4}", rh.value);

    let grid = [0.0, 0.25, 0.5, 1.0, 2.0];
    let si = self_improve_epsilon(s, w, 2.0, &grid, 3.0)?;
    for row in &si.table {
        println!("  [w^(1+{})]_A2 = {:.4}", row.eps, row.characteristic);
    }
    println!("largest eps within budget {}: {}", si.budget, si.eps);
    Ok(())
}
