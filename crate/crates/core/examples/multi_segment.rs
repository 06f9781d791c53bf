//! Continuing a path past two segments.
//!
//! Each middle segment gets the laser phase that keeps ⟨ψ|H|ψ⟩ = 0; the last
//! one is solved to bring the bright state home.

use nhqc::holonomy::{close_path, continue_path, extract_gate, Branch};
use nhqc::{BrightFrame, PathPlan, SegmentSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let frame = BrightFrame::new(0.7, 0.4)?;
    let first = SegmentSpec::from_angles(frame, 0.6, 1.2, 1.0, 0.0)?;
    let mut plan = PathPlan::new(frame, vec![first])?;
    plan = continue_path(&plan, 0.4, 1.8, 1.0, Branch::Principal)?;
    plan = continue_path(&plan, 0.3, 1.0, 1.0, Branch::Complement)?;
    plan = close_path(&plan, 1.5, 1.0, Branch::Principal)?;
    let report = extract_gate(&plan, 1e-8)?;
    for (j, s) in plan.segments.iter().enumerate() {
        println!("segment {j}: vartheta={:.6} eta={:.6} laser_phase={:.6}", s.vartheta(), s.eta(), s.laser_phase);
    }
    println!("{}", serde_json::to_string_pretty(&report.to_json())?);
    Ok(())
}
