//! Extends a weight from the right half of [-1, 1] to the whole interval and
//! checks what the extension looks like back on the subset.

use muckenhoupt::extension::{check_extension_condition, restrict_weight_report, wolff_extend};
use muckenhoupt::factorization::DEFAULT_TOL;
use muckenhoupt::scenario::line_power_scenario;

fn main() -> muckenhoupt::Result<()> {
    let sc = line_power_scenario(129, 0.5)?;
    let (s, e, w) = (&sc.space, &sc.e, &sc.w);

    let cond = check_extension_condition(s, e, w, 2.0, &[0.0, 0.25, 0.5, 1.0], 4.0)?;
    for row in &cond.table {
        println!("eps = {:<4}: induced A2 of w^(1+eps) = {:.4}", row.eps, row.characteristic);
    }
    let eps = cond.best_eps.unwrap_or(0.0);

    let r = wolff_extend(s, e, w, 2.0, eps, DEFAULT_TOL)?;
    println!("extension with eps = {eps}: A2 constant {:.4}, agreement error {:.1e}", r.ap_constant_w, r.agreement_error);
    for i in (0..129).step_by(16) {
        println!("  x = {:+.3}  W = {:.4}", sc.coords[i], r.w_ext[i]);
    }

    let back = restrict_weight_report(s, e, &r.w_ext, 2.0, 0.0)?;
    println!("induced / global on every ball <= {:.4}", back.max_ratio);
    Ok(())
}
