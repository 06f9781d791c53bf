//! Dynamical decoupling interleaved with multi-segment holonomic paths.
//!
//! The group {I, g₁, g₂, g₃} of diagonal sign flips averages the decay
//! couplings |e⟩⟨j| + h.c. to zero. A four-segment plan is protected by
//! applying g₁, g₃, g₁, g₃ after its segments and conjugating the segment
//! Hamiltonians into the matching toggling frames, which leaves the overall
//! evolution unchanged.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::lambda::{bright_dark, frame_change, hamiltonian, SegmentSpec, LEVEL_0, LEVEL_1, LEVEL_E};
use crate::operators::{expm_hermitian, frobenius_distance, Operator, SpectralPropagator, C64};
use crate::propagation::{sequence_propagator, ControlStep, PathPlan};
use crate::{BrightFrame, Error, Result, Tolerances};

/// Named elements of the decoupling group plus the dephasing pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pulse {
    #[serde(rename = "g1")]
    G1,
    #[serde(rename = "g2")]
    G2,
    #[serde(rename = "g3")]
    G3,
    #[serde(rename = "P")]
    P,
}

impl Pulse {
    pub fn name(self) -> &'static str {
        match self {
            Pulse::G1 => "g1",
            Pulse::G2 => "g2",
            Pulse::G3 => "g3",
            Pulse::P => "P",
        }
    }

    pub fn operator(self) -> Operator {
        match self {
            Pulse::G1 => Operator::from_real_diagonal(&[-1.0, 1.0, -1.0]),
            Pulse::G2 => Operator::from_real_diagonal(&[-1.0, -1.0, 1.0]),
            Pulse::G3 => Operator::from_real_diagonal(&[1.0, -1.0, -1.0]),
            Pulse::P => dephasing_pulse(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecouplingGroup {
    /// I, g₁, g₂, g₃ on (|0⟩, |1⟩, |e⟩).
    pub elements: [Operator; 4],
}

pub fn build_group() -> DecouplingGroup {
    DecouplingGroup {
        elements: [
            Operator::identity(3),
            Pulse::G1.operator(),
            Pulse::G2.operator(),
            Pulse::G3.operator(),
        ],
    }
}

/// Physical realization of g₁ (k = 1) or g₃ (k = 3) as a π rotation
/// e^{−iπG} on one arm of the Λ, G = |e⟩⟨j| + h.c.
///
/// G has eigenvalues ±1 and 0, so the exponential is exactly I − 2G².
pub fn pulse_realization(k: u8) -> Result<Operator> {
    let arm = match k {
        1 => LEVEL_0,
        3 => LEVEL_1,
        _ => return Err(Error::InvalidArgument(format!("no pulse realization for g{k}"))),
    };
    let g = &Operator::unit(3, LEVEL_E, arm) + &Operator::unit(3, arm, LEVEL_E);
    Ok(&Operator::identity(3) - &(&g * &g).scale(C64::new(2.0, 0.0)))
}

/// Group average ¼ Σ_k g_k† C g_k of a system-side coupling operator.
pub fn first_order_average(group: &DecouplingGroup, coupling: &Operator) -> Operator {
    let sum = group
        .elements
        .iter()
        .map(|g| &(&g.adjoint() * coupling) * g)
        .fold(Operator::zeros(coupling.dim()), |acc, x| &acc + &x);
    sum.scale(C64::new(0.25, 0.0))
}

/// P = exp(−i(π/√2)[|e⟩(⟨0| − ⟨1|) + h.c.]), which swaps |0⟩ and |1⟩ and
/// flips the sign of |e⟩.
pub fn dephasing_pulse() -> Operator {
    let one = C64::new(1.0, 0.0);
    let mut g = Operator::zeros(3);
    g.set(LEVEL_E, LEVEL_0, one);
    g.set(LEVEL_E, LEVEL_1, -one);
    g.set(LEVEL_0, LEVEL_E, one);
    g.set(LEVEL_1, LEVEL_E, -one);
    expm_hermitian(&g, PI / SQRT_2).expect("generator is Hermitian")
}

/// g H g for a diagonal group element, re-expressed as a Λ-form segment.
pub fn conjugate_segment(g: &Operator, seg: &SegmentSpec) -> Result<SegmentSpec> {
    let h = &(g * &hamiltonian(seg)) * g;
    SegmentSpec::from_hamiltonian(&h, seg.tau, 1e-12)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtectedStep {
    /// Segment after conjugation into its toggling frame.
    pub segment: SegmentSpec,
    /// Pulse applied right after the segment.
    pub pulse: Option<Pulse>,
    /// Toggling frame used for the conjugation (None for the identity).
    pub toggle: Option<Pulse>,
}

/// A plan interleaved with decoupling pulses.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtectedSchedule {
    pub initial_frame: BrightFrame,
    pub steps: Vec<ProtectedStep>,
}

const PULSES: [Pulse; 4] = [Pulse::G1, Pulse::G3, Pulse::G1, Pulse::G3];
const TOGGLES: [Option<Pulse>; 4] = [None, Some(Pulse::G1), Some(Pulse::G2), Some(Pulse::G3)];

/// Interleaves a four-segment plan with the sequence g₁, g₃, g₁, g₃.
pub fn interleave(plan: &PathPlan) -> Result<ProtectedSchedule> {
    plan.validate()?;
    if plan.segments.len() != 4 {
        return Err(Error::InvalidPlan(format!(
            "decoupling needs exactly 4 segments, got {}",
            plan.segments.len()
        )));
    }
    let steps = plan
        .segments
        .iter()
        .zip(TOGGLES)
        .zip(PULSES)
        .map(|((seg, toggle), pulse)| {
            let segment = match toggle {
                None => *seg,
                Some(g) => conjugate_segment(&g.operator(), seg)?,
            };
            Ok(ProtectedStep { segment, pulse: Some(pulse), toggle })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProtectedSchedule { initial_frame: plan.initial_frame, steps })
}

impl crate::propagation::ControlSequence for ProtectedSchedule {
    fn control_steps(&self) -> Vec<ControlStep> {
        ProtectedSchedule::control_steps(self)
    }
}

impl ProtectedSchedule {
    /// Evolutions, frame compensations and instantaneous pulses in order.
    pub fn control_steps(&self) -> Vec<ControlStep> {
        let mut out = Vec::new();
        let mut t = 0.0;
        for (k, step) in self.steps.iter().enumerate() {
            if k > 0 {
                let prev = &self.steps[k - 1].segment;
                if prev.delta != step.segment.delta {
                    out.push(ControlStep::Pulse(frame_change(prev.delta, step.segment.delta, t)));
                }
            }
            out.push(ControlStep::Evolve { hamiltonian: hamiltonian(&step.segment), tau: step.segment.tau });
            if let Some(p) = step.pulse {
                out.push(ControlStep::Pulse(p.operator()));
            }
            t += step.segment.tau;
        }
        out
    }

    pub fn propagator(&self) -> Result<Operator> {
        sequence_propagator(&self.control_steps())
    }

    /// ‖U_protected − U_plan‖_F
    pub fn equivalence_error(&self, plan: &PathPlan) -> Result<f64> {
        frobenius_distance(&self.propagator()?, &plan.propagator()?)
    }

    /// Largest |⟨φ_k|H′|φ_l⟩| along the protected evolution, with the
    /// subspace carried through every pulse (the toggled subspaces g·S).
    pub fn geometric_residual(&self, samples_per_segment: usize) -> Result<f64> {
        if samples_per_segment < 2 {
            return Err(Error::InvalidArgument("need at least 2 samples per segment".into()));
        }
        let (b, d) = bright_dark(&self.initial_frame);
        let mut basis = [b, d];
        let mut worst: f64 = 0.0;
        for step in self.control_steps() {
            match step {
                ControlStep::Pulse(p) => basis = [p.apply(&basis[0]), p.apply(&basis[1])],
                ControlStep::Evolve { hamiltonian: h, tau } => {
                    let prop = SpectralPropagator::new(&h, Tolerances::default().hermiticity)?;
                    for n in 0..samples_per_segment {
                        let u = prop.at(tau * n as f64 / (samples_per_segment - 1) as f64)?;
                        let x = u.apply(&basis[0]);
                        let y = u.apply(&basis[1]);
                        for (p, q) in [(&x, &x), (&x, &y), (&y, &x), (&y, &y)] {
                            worst = worst.max(h.matrix_element(p, q).norm());
                        }
                        if n + 1 == samples_per_segment {
                            basis = [x, y];
                        }
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Ordered list of `{"segment": …, "pulse": name|null}`; the pulse acts
    /// after its segment.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.steps
                .iter()
                .map(|s| {
                    json!({
                        "pulse": s.pulse.map(Pulse::name),
                        "segment": s.segment,
                    })
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::BrightFrame;
    use crate::operators::Ket;
    use std::f64::consts::FRAC_PI_4;

    fn diag(op: &Operator) -> Vec<f64> {
        (0..3).map(|i| op.get(i, i).re).collect()
    }

    #[test]
    fn group_structure() {
        let g = build_group();
        assert_eq!(diag(&g.elements[1]), vec![-1.0, 1.0, -1.0]);
        for e in &g.elements {
            assert_eq!(&(e * e), &Operator::identity(3));
        }
        assert_eq!(&g.elements[1] * &g.elements[3], g.elements[2]);
        for a in &g.elements {
            for b in &g.elements {
                assert_eq!(a * b, b * a);
            }
        }
    }

    #[test]
    fn pulse_realizations_match_group() {
        let g1 = pulse_realization(1).unwrap();
        let g3 = pulse_realization(3).unwrap();
        assert!(frobenius_distance(&g1, &Pulse::G1.operator()).unwrap() < 1e-12);
        assert!(frobenius_distance(&g3, &Pulse::G3.operator()).unwrap() < 1e-12);
        assert!(frobenius_distance(&(&g1 * &g1), &Operator::identity(3)).unwrap() < 1e-12);
        assert!(pulse_realization(2).is_err());
    }

    #[test]
    fn decay_couplings_average_out() {
        let group = build_group();
        let c0 = &Operator::unit(3, 2, 0) + &Operator::unit(3, 0, 2);
        let c1 = &Operator::unit(3, 2, 1) + &Operator::unit(3, 1, 2);
        assert!(first_order_average(&group, &c0).max_abs() <= 1e-15);
        assert!(first_order_average(&group, &c1).max_abs() <= 1e-15);
        let id = Operator::identity(3);
        assert_eq!(first_order_average(&group, &id), id);
    }

    #[test]
    fn dephasing_pulse_action() {
        let p = dephasing_pulse();
        let k0 = Ket::basis(3, 0);
        let k1 = Ket::basis(3, 1);
        let ke = Ket::basis(3, 2);
        assert!((p.apply(&k0) - k1.clone()).norm() < 1e-12);
        assert!((p.apply(&k1) - k0.clone()).norm() < 1e-12);
        assert!((p.apply(&ke) + ke.clone()).norm() < 1e-12);
        assert!(frobenius_distance(&(&p * &p), &Operator::identity(3)).unwrap() < 1e-12);

        let proj0 = Operator::unit(3, 0, 0);
        let sym = (&proj0 + &(&(&p.adjoint() * &proj0) * &p)).scale(C64::new(0.5, 0.0));
        let block = sym.submatrix(&[0, 1]);
        let half = Operator::identity(2).scale(C64::new(0.5, 0.0));
        assert!(frobenius_distance(&block, &half).unwrap() < 1e-12);
    }

    #[test]
    fn conjugated_segment_keeps_lambda_form() {
        let seg = SegmentSpec::new(BrightFrame::new(FRAC_PI_4, 0.0).unwrap(), 1.0, 0.3, 0.0, 1.0).unwrap();
        let g1 = Pulse::G1.operator();
        let c = conjugate_segment(&g1, &seg).unwrap();
        assert!((c.theta - FRAC_PI_4).abs() < 1e-12);
        assert!((c.phi - PI).abs() < 1e-12);
        assert!(crate::operators::angle_difference(c.laser_phase, 0.0).abs() < 1e-12);
        let direct = &(&g1 * &hamiltonian(&seg)) * &g1;
        assert!(frobenius_distance(&hamiltonian(&c), &direct).unwrap() < 1e-12);
    }

    #[test]
    fn identity_dynamics_protected_is_identity() {
        let f = BrightFrame::computational();
        let idle = SegmentSpec::new(f, 0.0, 0.0, 0.0, 0.5).unwrap();
        let plan = PathPlan::new(f, vec![idle; 4]).unwrap();
        let sched = interleave(&plan).unwrap();
        assert!(frobenius_distance(&sched.propagator().unwrap(), &Operator::identity(3)).unwrap() < 1e-15);
    }

    #[test]
    fn wrong_segment_count() {
        let f = BrightFrame::computational();
        let s = SegmentSpec::new(f, 1.0, 0.0, 0.0, 1.0).unwrap();
        let plan = PathPlan::new(f, vec![s; 3]).unwrap();
        assert!(matches!(interleave(&plan), Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn schedule_json_shape() {
        let f = BrightFrame::computational();
        let s = SegmentSpec::new(f, 1.0, 0.2, 0.0, 1.0).unwrap();
        let sched = interleave(&PathPlan::new(f, vec![s; 4]).unwrap()).unwrap();
        let v = sched.to_json();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 4);
        assert_eq!(arr[0]["pulse"], "g1");
        assert_eq!(arr[1]["pulse"], "g3");
        assert!(arr[2]["segment"]["laser_phase"].is_number());
    }
}
