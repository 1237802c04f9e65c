//! Refinement studies: how the tabulated constants move as the grid doubles.

use muckenhoupt::factorization::DEFAULT_TOL;
use muckenhoupt::study::{condition_study, extension_study, max_step_factor, whitney_study};

fn main() -> muckenhoupt::Result<()> {
    let ext = extension_study(&[32, 64, 128], 0.5, 2.0, 0.5, DEFAULT_TOL)?;
    print!("{}", ext.to_csv()?);
    println!("step factor of the extension constant: {:.3}\n", max_step_factor(&ext.column("ap_constant_W").unwrap()));

    for a in [0.5, 0.9] {
        let t = condition_study(&[32, 64, 128], a, 2.0, &[0.5])?;
        println!("a = {a}: {:?}", t.column("characteristic").unwrap());
    }

    let wh = whitney_study(&[16, 32], 1)?;
    println!("\n{}", wh.to_csv()?);
    Ok(())
}
