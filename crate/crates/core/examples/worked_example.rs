//! Two-segment path with Σϑ ≈ 0.577π implementing a small phase gate.
//!
//! First segment: ϑ₁ = π/3, η₁ = atan(4/3) (Δ₁ = 1.5, Ω = 1).
//! Second segment: resonant, ϑ₂ and φ₂ from the matching conditions.
//!
//! `cargo run --example worked_example -- --write plan.json` also saves the plan.

use std::f64::consts::{FRAC_PI_2, PI};

use nhqc::holonomy::{build_matched_pair, closed_form_beta, extract_gate, Branch, SegmentAngles};
use nhqc::BrightFrame;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eta1 = (4.0f64 / 3.0).atan();
    let (plan, sol) = build_matched_pair(
        BrightFrame::computational(),
        0.0,
        SegmentAngles::new(PI / 3.0, eta1),
        FRAC_PI_2,
        1.0,
        1.0,
        Branch::Principal,
    )?;
    let report = extract_gate(&plan, 1e-8)?;

    println!("theta2          = {:.6} pi", sol.theta2 / PI);
    println!("phi2 - phi1     = {:.12} rad", nhqc::operators::angle_difference(sol.phi2, 0.0));
    println!("beta (closed)   = {:.10} pi", closed_form_beta(&plan).unwrap_or(f64::NAN) / PI);
    println!("beta (simulated)= {:.10} pi", report.beta / PI);
    println!("total angle     = {:.10} pi", report.total_angle / PI);
    println!("cyclic residual = {:.2e}", report.cyclic_residual);
    println!("geom. residual  = {:.2e}", report.geometric_residual);

    let args: Vec<String> = std::env::args().collect();
    if let Some(i) = args.iter().position(|a| a == "--write") {
        let path = args.get(i + 1).ok_or("--write needs a path")?;
        std::fs::write(path, serde_json::to_string_pretty(&plan)? + "\n")?;
        println!("plan written to {path}");
    }
    Ok(())
}
