//! Builds the three kinds of metric measure space and inspects their balls.

use muckenhoupt::balls::doubling_constant;
use muckenhoupt::space::{build_grid_space, Edge};
use muckenhoupt::MetricMeasureSpace;

fn main() -> muckenhoupt::Result<()> {
    // two points at distance 1 with masses 1 and 3
    let pair = MetricMeasureSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![1.0, 3.0])?;
    pair.validate()?;

    // a weighted 5-cycle; distances are shortest paths
    let edges = (0..5).map(|u| Edge { u, v: (u + 1) % 5, len: 1.0 + u as f64 }).collect();
    let ring = MetricMeasureSpace::from_graph(5, edges, vec![1.0; 5])?;
    println!("ring: d(0, 3) = {}", ring.dist(0, 3));

    // 8x8 lattice with spacing 1/7 and counting measure times h^2
    let grid = build_grid_space(2, 8, 1.0 / 7.0)?;
    let balls = grid.balls()?;
    println!("grid: {} points, {} distinct balls", grid.len(), balls.ball_count());
    println!("ball of radius 0.2 at 0 has members {:?}", grid.within(0, 0.2));

    for (name, s) in [("pair", &pair), ("ring", &ring), ("grid", &grid)] {
        let d = doubling_constant(s)?;
        println!("{name}: doubling constant {:.4} (center {}, radius {})", d.constant, d.center, d.radius);
    }
    Ok(())
}
