//! Shorter paths spend less time with population in |e⟩.
//!
//! Compares the Σϑ ≈ 0.577π plan against a resonant π pulse at the same
//! Rabi amplitude under spontaneous decay, for a few decay rates.

use std::f64::consts::{FRAC_PI_2, PI};

use nhqc::holonomy::{build_matched_pair, Branch, SegmentAngles};
use nhqc::noise::{compare_paths, NoiseModel};
use nhqc::{BrightFrame, PathPlan, SegmentSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let frame = BrightFrame::computational();
    let (short, _) = build_matched_pair(
        frame,
        0.0,
        SegmentAngles::new(PI / 3.0, (4.0f64 / 3.0).atan()),
        FRAC_PI_2,
        1.0,
        1.0,
        Branch::Principal,
    )?;
    let reference = PathPlan::new(frame, vec![SegmentSpec::from_angles(frame, PI, FRAC_PI_2, 1.0, 0.0)?])?;

    println!("{:>10} {:>14} {:>14}", "gamma", "F(short)", "F(pi pulse)");
    for gamma in [0.0, 1e-3, 2e-3, 1e-2] {
        let cmp = compare_paths(&short, &reference, &NoiseModel::decay(gamma, gamma), None)?;
        println!("{gamma:>10.0e} {:>14.10} {:>14.10}", cmp.fidelity_short, cmp.fidelity_reference);
    }
    Ok(())
}
