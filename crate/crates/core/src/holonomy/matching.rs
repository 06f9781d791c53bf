//! Matching conditions between consecutive segments.
//!
//! After the first segment the bright state has moved to
//! c_e|e⟩ + c_b|b₁⟩ with |c_e| = |sinϑ₁ sinη₁|. A second segment sharing the
//! same dark state brings it back onto |b₁⟩ iff it removes exactly that
//! excited population, |sinϑ₂ sinη₂| = |sinϑ₁ sinη₁|, and its laser phase
//! lines up the relative phase between |e⟩ and |b₁⟩.

use serde::{Deserialize, Serialize};

use crate::lambda::{frame_change, BrightFrame, SegmentSpec, LEVEL_E};
use crate::operators::{wrap_angle, C64, I};
use crate::propagation::PathPlan;
use crate::{Error, Result};

const DEGENERACY_TOL: f64 = 1e-9;

/// Which solution of sinϑ₂ = s to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// ϑ₂ ∈ (0, π/2]
    Principal,
    /// π − principal
    Complement,
}

/// Rotation and mixing angle of one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentAngles {
    pub vartheta: f64,
    pub eta: f64,
}

impl SegmentAngles {
    pub fn new(vartheta: f64, eta: f64) -> Self {
        Self { vartheta, eta }
    }

    pub fn of(seg: &SegmentSpec) -> Self {
        Self { vartheta: seg.vartheta(), eta: seg.eta() }
    }

    /// sinϑ sinη, the signed amplitude moved into |e⟩.
    fn lift(&self) -> f64 {
        self.vartheta.sin() * self.eta.sin()
    }

    /// arg(cosϑ + i sinϑ cosη)
    fn rotation_phase(&self) -> f64 {
        C64::new(self.vartheta.cos(), self.vartheta.sin() * self.eta.cos()).arg()
    }

    /// arg(cosϑ + i sinϑ cosη) − ϑ cosη
    fn beta_contribution(&self) -> f64 {
        self.rotation_phase() - self.vartheta * self.eta.cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchSolution {
    pub theta2: f64,
    /// Branch constant: π when the signed lifts agree, 0 when they are opposite.
    pub a: f64,
    pub phi2: f64,
    /// |sinϑ sinη| = 1: the phase φ₂ is global and unconstrained.
    pub degenerate_phase: bool,
}

/// ϑ₂ with |sinϑ₂ sinη₂| = |sinϑ₁ sinη₁|.
pub fn match_rotation_angle(theta1: f64, eta1: f64, eta2: f64, branch: Branch) -> Result<f64> {
    if !(theta1 > 0.0) || !theta1.is_finite() {
        return Err(Error::InvalidArgument(format!("theta1 must be positive, got {theta1}")));
    }
    for eta in [eta1, eta2] {
        if !(eta > 0.0 && eta <= std::f64::consts::PI) {
            return Err(Error::InvalidArgument(format!("eta {eta} outside (0, pi]")));
        }
    }
    let lift = (theta1.sin() * eta1.sin()).abs();
    let reach = eta2.sin().abs();
    if lift < 1e-12 {
        return Err(Error::NoSolution(
            "first segment is already a closed loop; no second segment needed".into(),
        ));
    }
    if reach < 1e-12 || lift > reach * (1.0 + 1e-12) {
        return Err(Error::NoSolution(format!(
            "second segment reaches at most |sin eta2| = {reach:.6} but {lift:.6} is required"
        )));
    }
    let principal = (lift / reach).min(1.0).asin();
    Ok(match branch {
        Branch::Principal => principal,
        Branch::Complement => std::f64::consts::PI - principal,
    })
}

/// Laser phase φ₂ of the second segment that closes the path.
///
/// `tau` is the end time of the first segment, where the frame changes from
/// detuning `delta1` to `delta2`.
pub fn match_phase(
    phi1: f64,
    delta1: f64,
    delta2: f64,
    tau: f64,
    first: SegmentAngles,
    second: SegmentAngles,
) -> Result<MatchSolution> {
    let (l1, l2) = (first.lift(), second.lift());
    let a = if (l2 - l1).abs() <= DEGENERACY_TOL {
        std::f64::consts::PI
    } else if (l2 + l1).abs() <= DEGENERACY_TOL {
        0.0
    } else {
        return Err(Error::MatchViolation(format!(
            "|sin(th1)sin(eta1)| = {:.12} but |sin(th2)sin(eta2)| = {:.12}",
            l1.abs(),
            l2.abs()
        )));
    };
    let phi2 = phi1 + (delta1 - delta2) * tau - a - first.rotation_phase() - second.rotation_phase();
    Ok(MatchSolution {
        theta2: second.vartheta,
        a,
        phi2: wrap_angle(phi2),
        degenerate_phase: (l1.abs() - 1.0).abs() <= DEGENERACY_TOL,
    })
}

/// β from segment parameters for a single closed loop or a matched pair
/// sharing one bright frame; `None` for anything else.
pub fn closed_form_beta(plan: &PathPlan) -> Option<f64> {
    let same_frame = plan.segments.iter().all(|s| {
        (s.theta - plan.initial_frame.theta).abs() < 1e-12
            && crate::operators::angle_difference(s.phi, plan.initial_frame.phi).abs() < 1e-12
    });
    if !same_frame {
        return None;
    }
    match plan.segments.as_slice() {
        [seg] => {
            let ang = SegmentAngles::of(seg);
            (ang.lift().abs() < DEGENERACY_TOL).then(|| wrap_angle(ang.beta_contribution()))
        }
        [s1, s2] => {
            let (a1, a2) = (SegmentAngles::of(s1), SegmentAngles::of(s2));
            if (a1.lift().abs() - a2.lift().abs()).abs() > DEGENERACY_TOL || a1.lift().abs() < DEGENERACY_TOL {
                return None;
            }
            if (a1.lift().abs() - 1.0).abs() <= DEGENERACY_TOL {
                let a = if (a1.lift() - a2.lift()).abs() <= DEGENERACY_TOL { std::f64::consts::PI } else { 0.0 };
                Some(wrap_angle(s1.laser_phase - s2.laser_phase + a))
            } else {
                Some(wrap_angle(a1.beta_contribution() + a2.beta_contribution()))
            }
        }
        _ => None,
    }
}

/// Builds a matched two-segment plan: the first segment has rotation angle
/// ϑ₁ and mixing angle η₁ at Rabi amplitude `omega1`; the second has mixing
/// angle η₂ at `omega2`, with ϑ₂ and φ₂ fixed by the matching conditions.
#[allow(clippy::too_many_arguments)]
pub fn build_matched_pair(
    frame: BrightFrame,
    phi1: f64,
    first: SegmentAngles,
    eta2: f64,
    omega1: f64,
    omega2: f64,
    branch: Branch,
) -> Result<(PathPlan, MatchSolution)> {
    let s1 = SegmentSpec::from_angles(frame, first.vartheta, first.eta, omega1, phi1)?;
    let theta2 = match_rotation_angle(first.vartheta, first.eta, eta2, branch)?;
    // detuning of the second segment, needed for the frame phase
    let probe = SegmentSpec::from_angles(frame, theta2, eta2, omega2, 0.0)?;
    let sol = match_phase(
        s1.laser_phase,
        s1.delta,
        probe.delta,
        s1.tau,
        SegmentAngles::of(&s1),
        SegmentAngles::new(theta2, eta2),
    )?;
    let s2 = SegmentSpec { laser_phase: sol.phi2, ..probe };
    Ok((PathPlan::new(frame, vec![s1, s2])?, sol))
}

/// Appends the segment with mixing angle `eta` and Rabi amplitude `omega`
/// that returns the bright state of an arbitrary open prefix to |b₁⟩.
///
/// Works for any prefix whose segments share the initial bright frame,
/// which is how paths with more than two segments are continued.
pub fn close_path(prefix: &PathPlan, eta: f64, omega: f64, branch: Branch) -> Result<PathPlan> {
    prefix.validate()?;
    let frame = prefix.initial_frame;
    let last = prefix.segments.last().expect("validated plan");
    let probe = SegmentSpec::from_angles(frame, 1.0, eta, omega, 0.0)?;
    let handoff = frame_change(last.delta, probe.delta, prefix.total_duration());
    let b = frame.bright();
    let psi = handoff.apply(&prefix.propagator()?.apply(&b));
    let c_e = psi.amplitude(LEVEL_E);
    let c_b = b.inner(&psi);
    let c_d = frame.dark().inner(&psi);
    if c_d.norm() > 1e-9 {
        return Err(Error::InvalidPlan(
            "prefix does not keep the bright state within span{|b>, |e>}".into(),
        ));
    }
    if c_e.norm() < 1e-12 {
        return Err(Error::NoSolution("prefix is already cyclic".into()));
    }
    let reach = eta.sin();
    if c_e.norm() > reach * (1.0 + 1e-12) {
        return Err(Error::NoSolution(format!(
            "closing segment reaches {reach:.6}, excited amplitude is {:.6}",
            c_e.norm()
        )));
    }
    let principal = (c_e.norm() / reach).min(1.0).asin();
    let vt = match branch {
        Branch::Principal => principal,
        Branch::Complement => std::f64::consts::PI - principal,
    };
    // U†|b⟩ ∝ (cosϑ − i sinϑ cosη)|b⟩ + i e^{iφ} sinϑ sinη |e⟩ must be parallel to ψ
    let laser_phase = if c_b.norm() < 1e-12 {
        0.0
    } else {
        let rot = C64::new(vt.cos(), -vt.sin() * eta.cos());
        ((c_e / c_b) * rot / (I * vt.sin() * eta.sin())).arg()
    };
    let closing = SegmentSpec::from_angles(frame, vt, eta, omega, laser_phase)?;
    let mut segments = prefix.segments.clone();
    segments.push(closing);
    PathPlan::new(frame, segments)
}

/// Appends a segment with angles (ϑ, η) whose laser phase keeps the
/// evolution geometric: ⟨ψ|H|ψ⟩ = 0 for the current bright-state image ψ.
///
/// With ψ = c_b|b⟩ + c_e|e⟩ the energy is
/// Δ|c_e|² + 2Ω|c_b||c_e| cos(φ_L + arg c_b − arg c_e); `branch` picks the
/// sign of the root.
pub fn continue_path(prefix: &PathPlan, vartheta: f64, eta: f64, omega: f64, branch: Branch) -> Result<PathPlan> {
    prefix.validate()?;
    let frame = prefix.initial_frame;
    let last = prefix.segments.last().expect("validated plan");
    let probe = SegmentSpec::from_angles(frame, vartheta, eta, omega, 0.0)?;
    let handoff = frame_change(last.delta, probe.delta, prefix.total_duration());
    let psi = handoff.apply(&prefix.propagator()?.apply(&frame.bright()));
    let c_e = psi.amplitude(LEVEL_E);
    let c_b = frame.bright().inner(&psi);
    let laser_phase = if c_e.norm() < 1e-12 || c_b.norm() < 1e-12 {
        if probe.delta.abs() * c_e.norm_sqr() > 1e-12 {
            return Err(Error::NoSolution("detuned segment on a pure |e> state carries energy".into()));
        }
        0.0
    } else {
        let cos = -probe.delta * c_e.norm() / (2.0 * omega * c_b.norm());
        if cos.abs() > 1.0 + 1e-12 {
            return Err(Error::NoSolution(format!("no laser phase cancels the energy (cos = {cos:.6})")));
        }
        let x = cos.clamp(-1.0, 1.0).acos();
        let x = match branch {
            Branch::Principal => x,
            Branch::Complement => -x,
        };
        x - c_b.arg() + c_e.arg()
    };
    let seg = SegmentSpec::from_angles(frame, vartheta, eta, omega, laser_phase)?;
    let mut segments = prefix.segments.clone();
    segments.push(seg);
    PathPlan::new(frame, segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holonomy::{check_cyclic, check_geometric, extract_gate};
    use crate::operators::angle_difference;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn eta1() -> f64 {
        (4.0f64 / 3.0).atan()
    }

    #[test]
    fn worked_example_rotation_angle() {
        let th2 = match_rotation_angle(PI / 3.0, eta1(), FRAC_PI_2, Branch::Principal).unwrap();
        assert!((th2 - (2.0 * 3f64.sqrt() / 5.0).asin()).abs() < 1e-15);
        assert!((th2 / PI - 0.24378).abs() < 0.001);
        let lhs = (th2.sin() * FRAC_PI_2.sin()).abs();
        let rhs = ((PI / 3.0).sin() * eta1().sin()).abs();
        assert!((lhs - rhs).abs() < 1e-12);
        let comp = match_rotation_angle(PI / 3.0, eta1(), FRAC_PI_2, Branch::Complement).unwrap();
        assert!((comp - (PI - th2)).abs() < 1e-15);
    }

    #[test]
    fn symmetric_rotation_angle() {
        let th2 = match_rotation_angle(1.1, 0.8, 0.8, Branch::Principal).unwrap();
        assert!((th2 - 1.1).abs() < 1e-14);
    }

    #[test]
    fn unreachable_population() {
        assert!(matches!(
            match_rotation_angle(FRAC_PI_2, FRAC_PI_2, 0.8f64.asin(), Branch::Principal),
            Err(Error::NoSolution(_))
        ));
    }

    #[test]
    fn worked_example_phase() {
        let delta1_tau = 0.4 * PI;
        let th2 = match_rotation_angle(PI / 3.0, eta1(), FRAC_PI_2, Branch::Principal).unwrap();
        let phi1 = 0.37;
        let sol = match_phase(
            phi1,
            delta1_tau,
            0.0,
            1.0,
            SegmentAngles::new(PI / 3.0, eta1()),
            SegmentAngles::new(th2, FRAC_PI_2),
        )
        .unwrap();
        let expected = phi1 - 0.6 * PI - C64::new(5.0, 3.0 * 3f64.sqrt()).arg();
        assert!(angle_difference(sol.phi2, expected).abs() < 1e-12);
        assert_eq!(sol.a, PI);
        assert!(!sol.degenerate_phase);
    }

    #[test]
    fn degenerate_phase_flag() {
        let sol = match_phase(
            0.0,
            0.0,
            0.0,
            1.0,
            SegmentAngles::new(FRAC_PI_2, FRAC_PI_2),
            SegmentAngles::new(FRAC_PI_2, FRAC_PI_2),
        )
        .unwrap();
        assert!(sol.degenerate_phase);
    }

    #[test]
    fn symmetric_resonant_pair() {
        let phi1 = 0.9;
        let sol = match_phase(
            phi1,
            0.0,
            0.0,
            1.0,
            SegmentAngles::new(FRAC_PI_4, FRAC_PI_2),
            SegmentAngles::new(FRAC_PI_4, FRAC_PI_2),
        )
        .unwrap();
        assert_eq!(sol.a, PI);
        assert!(angle_difference(sol.phi2, phi1 - PI).abs() < 1e-12);

        let frame = BrightFrame::new(0.5, 0.1).unwrap();
        let s1 = SegmentSpec::from_angles(frame, FRAC_PI_4, FRAC_PI_2, 1.0, phi1).unwrap();
        let s2 = SegmentSpec::from_angles(frame, FRAC_PI_4, FRAC_PI_2, 1.0, sol.phi2).unwrap();
        let plan = PathPlan::new(frame, vec![s1, s2]).unwrap();
        assert!(check_cyclic(&plan).unwrap() < 1e-8);
    }

    #[test]
    fn violation_detected() {
        assert!(matches!(
            match_phase(0.0, 0.0, 0.0, 1.0, SegmentAngles::new(0.5, 1.0), SegmentAngles::new(0.7, 1.0)),
            Err(Error::MatchViolation(_))
        ));
    }

    #[test]
    fn opposite_lift_uses_zero_branch() {
        // ϑ₂ > π with the same η flips the sign of sinϑ₂ sinη₂
        let first = SegmentAngles::new(0.6, 1.2);
        let second = SegmentAngles::new(PI + 0.6, 1.2);
        let sol = match_phase(0.0, 0.3, 0.3, 1.0, first, second).unwrap();
        assert_eq!(sol.a, 0.0);
    }

    #[test]
    fn matched_pair_is_holonomic() {
        let frame = BrightFrame::new(0.7, 2.0).unwrap();
        for branch in [Branch::Principal, Branch::Complement] {
            let (plan, _) =
                build_matched_pair(frame, 0.3, SegmentAngles::new(2.0, 0.7), 2.2, 1.0, 0.8, branch).unwrap();
            let r = extract_gate(&plan, 1e-8).unwrap();
            assert!(r.geometric_residual < 1e-8);
            assert!(angle_difference(r.beta, r.closed_form_beta.unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn close_path_reproduces_match_phase() {
        let frame = BrightFrame::computational();
        let (pair, sol) =
            build_matched_pair(frame, 0.2, SegmentAngles::new(PI / 3.0, eta1()), FRAC_PI_2, 1.0, 1.0, Branch::Principal)
                .unwrap();
        let prefix = PathPlan::new(frame, vec![pair.segments[0]]).unwrap();
        let closed = close_path(&prefix, FRAC_PI_2, 1.0, Branch::Principal).unwrap();
        let s2 = closed.segments[1];
        assert!(angle_difference(s2.laser_phase, sol.phi2).abs() < 1e-10);
        assert!((s2.vartheta() - sol.theta2).abs() < 1e-12);
    }

    #[test]
    fn close_path_three_segments() {
        let frame = BrightFrame::new(1.0, 0.5).unwrap();
        let s1 = SegmentSpec::from_angles(frame, 0.9, 1.1, 1.0, 0.0).unwrap();
        let prefix = PathPlan::new(frame, vec![s1]).unwrap();
        let prefix = continue_path(&prefix, 0.5, 1.4, 0.7, Branch::Complement).unwrap();
        assert!(check_geometric(&prefix, 32).unwrap() < 1e-8);
        let plan = close_path(&prefix, 1.5, 1.0, Branch::Principal).unwrap();
        assert_eq!(plan.segments.len(), 3);
        assert!(check_cyclic(&plan).unwrap() < 1e-8);
        assert!(check_geometric(&plan, 32).unwrap() < 1e-8);
    }
}
