//! Protecting a four-segment path with the pulses g₁, g₃, g₁, g₃.
//!
//! The worked-example path is cut into four pieces; interleaving the
//! decoupling pulses with toggled segments leaves the overall gate unchanged.

use std::f64::consts::{FRAC_PI_2, PI};

use nhqc::decoupling::{build_group, dephasing_pulse, first_order_average, interleave};
use nhqc::holonomy::{build_matched_pair, Branch, SegmentAngles};
use nhqc::lambda::{LEVEL_0, LEVEL_E};
use nhqc::{BrightFrame, Operator};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (pair, _) = build_matched_pair(
        BrightFrame::computational(),
        0.0,
        SegmentAngles::new(PI / 3.0, (4.0f64 / 3.0).atan()),
        FRAC_PI_2,
        1.0,
        1.0,
        Branch::Principal,
    )?;
    let plan = pair.subdivided(2)?;
    let schedule = interleave(&plan)?;
    println!("{}", serde_json::to_string_pretty(&schedule.to_json())?);
    println!("equivalence error  = {:.2e}", schedule.equivalence_error(&plan)?);
    println!("geometric residual = {:.2e}", schedule.geometric_residual(32)?);

    // a decay-type coupling |0⟩⟨e| + h.c. averages away over the group
    let coupling = &Operator::unit(3, LEVEL_0, LEVEL_E) + &Operator::unit(3, LEVEL_E, LEVEL_0);
    println!("first-order average norm = {:.2e}", first_order_average(&build_group(), &coupling).frobenius_norm());
    let p = dephasing_pulse();
    for i in 0..3 {
        let row: Vec<String> = (0..3).map(|j| format!("{:+.3}", p.get(i, j).re)).collect();
        println!("P[{i}] = [{}]", row.join(", "));
    }
    Ok(())
}
