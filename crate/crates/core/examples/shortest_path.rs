//! Grid search for the shortest matched path at several target phases.

use std::f64::consts::PI;

use nhqc::holonomy::{default_eta_grid, plan_shortest_path, DesignConstraints};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = default_eta_grid(61);
    let constraints = DesignConstraints::default();
    println!("{:>10} {:>12} {:>9} {:>9} {:>9}", "beta/pi", "sum(theta)/pi", "segments", "eta1", "eta2");
    for k in [1.0, 2.0, 4.0, 9.0, 18.0, 27.0, 35.0] {
        let target = k * PI / 18.0;
        let d = plan_shortest_path(target, &grid, &grid, &constraints)?;
        println!(
            "{:>10.4} {:>12.6} {:>9} {:>9.4} {:>9}",
            target / PI,
            d.total_angle / PI,
            d.plan.segments.len(),
            d.eta1,
            d.eta2.map_or("-".to_string(), |e| format!("{e:.4}")),
        );
    }
    Ok(())
}
