//! Holonomy conditions, gate extraction and path design.
//!
//! A plan realizes a nonadiabatic holonomic gate on span{|b₁⟩, |d₁⟩} when
//! the evolved subspace returns to itself (cyclic) and the Hamiltonian has
//! no matrix elements inside the evolving subspace at any time (geometric).
//! [`check_cyclic`] and [`check_geometric`] measure how far a plan is from
//! each condition; [`extract_gate`] reads off the resulting gate.

mod design;
mod matching;

pub use design::{default_eta_grid, plan_shortest_path, Design, DesignConstraints};
pub use matching::{
    build_matched_pair, close_path, closed_form_beta, continue_path, match_phase, match_rotation_angle, Branch,
    MatchSolution, SegmentAngles,
};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::lambda::{bright_dark, hamiltonian, BrightFrame};
use crate::operators::{wrap_angle, Operator, C64};
use crate::propagation::{evolve_path, PathPlan, Trajectory, DEFAULT_SAMPLES_PER_SEGMENT};
use crate::{Error, Result};

/// Result of simulating a plan and projecting onto the initial subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyReport {
    /// 2×2 gate on the ordered basis (|b₁⟩, |d₁⟩), normalized so the
    /// dark-dark entry is real and positive.
    pub gate: [[C64; 2]; 2],
    pub beta: f64,
    pub cyclic_residual: f64,
    pub geometric_residual: f64,
    pub total_angle: f64,
    /// Raw phases of ⟨b₁|U|b₁⟩ and ⟨d₁|U|d₁⟩ before normalization.
    pub bright_phase: f64,
    pub dark_phase: f64,
    pub frame: BrightFrame,
    /// β from the segment parameters, when the plan is a matched pair or a
    /// single closed loop.
    pub closed_form_beta: Option<f64>,
}

impl HolonomyReport {
    /// Ideal holonomic gate e^{iβ}|b⟩⟨b| + |d⟩⟨d| on the frame.
    pub fn ideal(frame: BrightFrame, beta: f64) -> Self {
        Self {
            gate: [
                [C64::from_polar(1.0, beta), C64::new(0.0, 0.0)],
                [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            ],
            beta: wrap_angle(beta),
            cyclic_residual: 0.0,
            geometric_residual: 0.0,
            total_angle: 0.0,
            bright_phase: beta,
            dark_phase: 0.0,
            frame,
            closed_form_beta: Some(wrap_angle(beta)),
        }
    }

    pub fn gate_operator(&self) -> Operator {
        let g = &self.gate;
        Operator::from_rows(2, &[g[0][0], g[0][1], g[1][0], g[1][1]]).expect("2x2")
    }

    /// The gate expressed on the computational basis (|0⟩, |1⟩).
    pub fn computational_gate(&self) -> Operator {
        let (b, d) = bright_dark(&self.frame);
        // columns of the change of basis are |b⟩, |d⟩ restricted to |0⟩,|1⟩
        let basis = Operator::from_rows(
            2,
            &[b.amplitude(0), d.amplitude(0), b.amplitude(1), d.amplitude(1)],
        )
        .expect("2x2");
        &(&basis * &self.gate_operator()) * &basis.adjoint()
    }

    pub fn is_cyclic(&self, tol: f64) -> bool {
        self.cyclic_residual <= tol
    }

    /// JSON document with the fixed report keys.
    pub fn to_json(&self) -> serde_json::Value {
        let gate: Vec<[f64; 2]> = self.gate.iter().flatten().map(|z| [z.re, z.im]).collect();
        json!({
            "beta": self.beta,
            "total_angle": self.total_angle,
            "cyclic_residual": self.cyclic_residual,
            "geometric_residual": self.geometric_residual,
            "gate": gate,
            "frame": { "theta": self.frame.theta, "phi": self.frame.phi },
            "bright_phase": self.bright_phase,
            "dark_phase": self.dark_phase,
            "closed_form_beta": self.closed_form_beta,
        })
    }
}

/// ‖P(T) − P(0)‖_F for the projector onto the evolved subspace.
pub fn check_cyclic(plan: &PathPlan) -> Result<f64> {
    Ok(cyclic_residual(&evolve_path(plan, 2)?))
}

fn cyclic_residual(traj: &Trajectory) -> f64 {
    (&traj.last().projector() - &traj.initial().projector()).frobenius_norm()
}

/// Largest |⟨φ_k(t)|H(t)|φ_l(t)⟩| over the sampled trajectory.
pub fn check_geometric(plan: &PathPlan, samples_per_segment: usize) -> Result<f64> {
    Ok(geometric_residual(plan, &evolve_path(plan, samples_per_segment)?))
}

fn geometric_residual(plan: &PathPlan, traj: &Trajectory) -> f64 {
    let hs: Vec<Operator> = plan.segments.iter().map(hamiltonian).collect();
    traj.samples
        .iter()
        .flat_map(|s| {
            let h = &hs[s.segment];
            let [x, y] = &s.basis;
            [
                h.matrix_element(x, x),
                h.matrix_element(x, y),
                h.matrix_element(y, x),
                h.matrix_element(y, y),
            ]
        })
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Σ_j ϑ_j over the plan.
pub fn total_rotation_angle(plan: &PathPlan) -> f64 {
    plan.segments.iter().map(|s| s.vartheta()).sum()
}

/// Simulates the plan and extracts the gate on span{|b₁⟩, |d₁⟩}.
///
/// Fails with [`Error::NotCyclic`] (carrying the report) when the cyclic
/// residual exceeds `tol`.
pub fn extract_gate(plan: &PathPlan, tol: f64) -> Result<HolonomyReport> {
    let report = simulate_report(plan, DEFAULT_SAMPLES_PER_SEGMENT)?;
    if report.cyclic_residual > tol {
        return Err(Error::NotCyclic(Box::new(report)));
    }
    Ok(report)
}

/// Same as [`extract_gate`] but always returns the report.
pub fn simulate_report(plan: &PathPlan, samples_per_segment: usize) -> Result<HolonomyReport> {
    let traj = evolve_path(plan, samples_per_segment)?;
    let u = plan.propagator()?;
    let (b, d) = bright_dark(&plan.initial_frame);
    let raw = [
        [u.matrix_element(&b, &b), u.matrix_element(&b, &d)],
        [u.matrix_element(&d, &b), u.matrix_element(&d, &d)],
    ];
    let dark_phase = raw[1][1].arg();
    let norm = C64::from_polar(1.0, -dark_phase);
    let gate = raw.map(|row| row.map(|z| z * norm));
    Ok(HolonomyReport {
        gate,
        beta: wrap_angle(gate[0][0].arg()),
        cyclic_residual: cyclic_residual(&traj),
        geometric_residual: geometric_residual(plan, &traj),
        total_angle: total_rotation_angle(plan),
        bright_phase: raw[0][0].arg(),
        dark_phase,
        frame: plan.initial_frame,
        closed_form_beta: closed_form_beta(plan),
    })
}

/// 2×2 computational-basis product `second · first`.
pub fn compose_gates(first: &HolonomyReport, second: &HolonomyReport) -> Operator {
    &second.computational_gate() * &first.computational_gate()
}
