//! Controlled phase gate from spin-selective holonomic loops.
//!
//! The |↑⟩ block runs a π loop (β = π), the |↓⟩ block a 2π loop that
//! returns with no phase.

use std::f64::consts::{FRAC_PI_2, PI};

use nhqc::twoqubit::{compose_conditional_gate, ConditionalPlan};
use nhqc::{BrightFrame, PathPlan, SegmentSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = BrightFrame::computational();
    let loop_with = |vartheta: f64| -> nhqc::Result<PathPlan> {
        PathPlan::new(f, vec![SegmentSpec::from_angles(f, vartheta, FRAC_PI_2, 1.0, 0.0)?])
    };
    let cp = ConditionalPlan { plan_up: loop_with(PI)?, plan_down: loop_with(2.0 * PI)? };
    let gate = compose_conditional_gate(&cp, 1e-8)?;
    println!("{}", serde_json::to_string_pretty(&gate.to_json()?)?);

    let local = ConditionalPlan { plan_up: loop_with(PI)?, plan_down: loop_with(PI)? };
    let gate = compose_conditional_gate(&local, 1e-8)?;
    println!("equal blocks entangling: {}", gate.to_json()?["entangling"]);
    Ok(())
}
