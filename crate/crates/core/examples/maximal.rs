//! Maximal functions on a grid and a Coifman–Rochberg weight built from one.

use muckenhoupt::maximal::{coifman_rochberg_weight, maximal_fn, strong_type_ratio, weak_type_constant};
use muckenhoupt::space::build_grid_space;
use muckenhoupt::Subset;

fn main() -> muckenhoupt::Result<()> {
    let s = build_grid_space(1, 21, 0.05)?;
    let mut f = vec![0.0; 21];
    f[3] = 1.0;

    let mf = maximal_fn(&s, &f, None, None)?;
    let right = Subset::new(21, (10..21).collect())?;
    let local = maximal_fn(&s, &f, None, Some(0.2))?;
    println!("Mf:         {:.3?}", &mf[..8]);
    println!("Mf, r<=0.2: {:.3?}", &local[..8]);

    // m_E only integrates over E but keeps the full ball mass
    let g: Vec<f64> = (0..21).map(|i| 1.0 + (i as f64 * 0.3).sin().abs()).collect();
    let me = maximal_fn(&s, &g, Some(&right), None)?;
    println!("m_E g at 0 and 20: {:.4} {:.4}", me[0], me[20]);

    let cr = coifman_rochberg_weight(&s, &f, 0.5, &[1.0; 21])?;
    println!("w = (Mf)^0.5 has A1 constant {:.4}", cr.a1.value);

    let ones = vec![1.0; 21];
    println!("weak (2,2) constant on E:  {:.4}", weak_type_constant(&s, &right, &cr.weight, &g, 2.0)?);
    println!("strong (2,2) ratio on E:   {:.4}", strong_type_ratio(&s, &right, &ones, &g, 2.0)?);
    Ok(())
}
