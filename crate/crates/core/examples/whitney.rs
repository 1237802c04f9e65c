//! Whitney cover of an L-shaped domain and quasihyperbolic distances in it.

use muckenhoupt::scenario::{nearest_point, unit_cube};
use muckenhoupt::whitney::{check_cover_invariants, whitney_cover, Domain, QhGraph};
use muckenhoupt::Subset;

fn main() -> muckenhoupt::Result<()> {
    let side = 41;
    let s = unit_cube(2, side)?;
    let inside = |i: usize| {
        let (x, y) = (i % side, i / side);
        let interior = (1..side - 1).contains(&x) && (1..side - 1).contains(&y);
        interior && !(x >= side / 2 && y >= side / 2)
    };
    let d = Domain::new(&s, Subset::new(s.len(), (0..s.len()).filter(|&i| inside(i)).collect())?)?;

    let cover = whitney_cover(&s, &d)?;
    check_cover_invariants(&s, &d, &cover)?;
    println!(
        "{} balls, overlap {}, radius ratio <= {:.2}, mass ratio <= {:.2}",
        cover.len(),
        cover.overlap_n,
        cover.max_radius_ratio,
        cover.max_mass_ratio
    );

    let qh = QhGraph::new(&s, &d)?;
    let a = nearest_point(&s, &[0.25, 0.25]);
    for target in [[0.25, 0.45], [0.75, 0.25], [0.25, 0.75]] {
        let b = nearest_point(&s, &target);
        println!("k({:?}, {:?}) = {:.4}", [0.25, 0.25], target, qh.distance(a, b)?);
    }
    Ok(())
}
