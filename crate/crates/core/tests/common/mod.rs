#![allow(dead_code)]

use std::f64::consts::PI;

use nhqc::holonomy::{build_matched_pair, Branch, SegmentAngles};
use nhqc::{BrightFrame, Operator, PathPlan, SegmentSpec, C64};
use rand::Rng;

pub const WORKED_EXAMPLE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/worked_example.json");

pub fn worked_example() -> PathPlan {
    serde_json::from_str(&std::fs::read_to_string(WORKED_EXAMPLE).unwrap()).unwrap()
}

/// exp(−iHt) by scaling and squaring of a truncated Taylor series.
pub fn taylor_expm(h: &Operator, t: f64) -> Operator {
    let a = h.scale(C64::new(0.0, -t));
    let norm = a.frobenius_norm();
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as u32 } else { 0 };
    let a = a.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));
    let mut sum = Operator::identity(h.dim());
    let mut term = Operator::identity(h.dim());
    for k in 1..30 {
        term = (&term * &a).scale(C64::new(1.0 / k as f64, 0.0));
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// (ϑ, η) straight from Ω, Δ, τ.
pub fn angles(seg: &SegmentSpec) -> (f64, f64) {
    let vt = ((seg.delta / 2.0).powi(2) + seg.omega.powi(2)).sqrt() * seg.tau;
    (vt, (2.0 * seg.omega).atan2(seg.delta))
}

/// Σ_j [arg(cosϑ_j + i sinϑ_j cosη_j) − ϑ_j cosη_j]
pub fn beta_oracle(plan: &PathPlan) -> f64 {
    plan.segments
        .iter()
        .map(|s| {
            let (vt, eta) = angles(s);
            C64::new(vt.cos(), vt.sin() * eta.cos()).arg() - vt * eta.cos()
        })
        .sum()
}

pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

pub fn random_frame<R: Rng>(rng: &mut R) -> BrightFrame {
    BrightFrame::new(rng.gen_range(0.0..PI / 2.0), rng.gen_range(0.0..2.0 * PI)).unwrap()
}

pub fn random_segment<R: Rng>(rng: &mut R, frame: BrightFrame, max_vartheta: f64) -> SegmentSpec {
    let eta = rng.gen_range(0.05..PI - 0.05);
    let vt = rng.gen_range(0.01..max_vartheta);
    SegmentSpec::from_angles(frame, vt, eta, rng.gen_range(0.2..3.0), rng.gen_range(0.0..2.0 * PI)).unwrap()
}

#[derive(Debug, Clone)]
pub struct MatchedDraw {
    pub plan: PathPlan,
    pub theta1: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub branch: Branch,
}

/// Random matched two-segment plan; unreachable draws are redrawn.
pub fn random_matched_pair<R: Rng>(rng: &mut R) -> MatchedDraw {
    loop {
        let frame = random_frame(rng);
        let theta1 = rng.gen_range(0.05..PI - 0.05);
        let eta1 = rng.gen_range(0.1..PI - 0.1);
        let eta2 = rng.gen_range(0.1..PI - 0.1);
        let branch = if rng.gen_bool(0.5) { Branch::Principal } else { Branch::Complement };
        let built = build_matched_pair(
            frame,
            rng.gen_range(0.0..2.0 * PI),
            SegmentAngles::new(theta1, eta1),
            eta2,
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
            branch,
        );
        if let Ok((plan, _)) = built {
            return MatchedDraw { plan, theta1, eta1, eta2, branch };
        }
    }
}
