//! Two-qubit gates conditioned on a control spin.
//!
//! The 6-dimensional space is spin ⊗ level with index 3·spin + level, spin
//! 0 ↔ |↑⟩ and 1 ↔ |↓⟩. Drives selective on the spin state act as a
//! Λ-system Hamiltonian inside one spin block only, so running one matched
//! plan per block produces U = |↑⟩⟨↑| ⊗ U_↑ + |↓⟩⟨↓| ⊗ U_↓.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::holonomy::{extract_gate, HolonomyReport};
use crate::lambda::hamiltonian;
use crate::operators::{Ket, Operator, C64};
use crate::propagation::{sequence_propagator, ControlStep, PathPlan};
use crate::{Error, Result, SegmentSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    fn projector(self) -> Operator {
        Operator::unit(2, self.index(), self.index())
    }
}

/// |j⟩⟨j| ⊗ H(seg), with the auxiliary level |a⟩ in the role of |e⟩.
pub fn conditional_hamiltonian(spin: Spin, seg: &SegmentSpec) -> Operator {
    spin.projector().kron(&hamiltonian(seg))
}

/// |j⟩⟨j| ⊗ U + (I − |j⟩⟨j|) ⊗ I
fn conditional_unitary(spin: Spin, u: &Operator) -> Operator {
    let other = Operator::identity(2) - spin.projector();
    &spin.projector().kron(u) + &other.kron(&Operator::identity(3))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPlan {
    pub plan_up: PathPlan,
    pub plan_down: PathPlan,
}

impl ConditionalPlan {
    fn plan(&self, spin: Spin) -> &PathPlan {
        match spin {
            Spin::Up => &self.plan_up,
            Spin::Down => &self.plan_down,
        }
    }

    /// Sequential schedule: the ↑-selective segments, then the ↓-selective
    /// ones. The blocks commute, so the order does not matter.
    pub fn control_steps(&self) -> Vec<ControlStep> {
        [Spin::Up, Spin::Down]
            .into_iter()
            .flat_map(|spin| {
                self.plan(spin).control_steps().into_iter().map(move |step| match step {
                    ControlStep::Evolve { hamiltonian, tau } => ControlStep::Evolve {
                        hamiltonian: spin.projector().kron(&hamiltonian),
                        tau,
                    },
                    ControlStep::Pulse(p) => ControlStep::Pulse(conditional_unitary(spin, &p)),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ConditionalGate {
    /// 6×6 propagator with each block normalized so its dark state is
    /// left unchanged.
    pub full: Operator,
    /// Restriction to (↑0, ↑1, ↓0, ↓1).
    pub gate: Operator,
    pub report_up: HolonomyReport,
    pub report_down: HolonomyReport,
}

const COMPUTATIONAL: [usize; 4] = [0, 1, 3, 4];

/// Simulates both spin-conditioned plans and assembles U_ne.
pub fn compose_conditional_gate(cp: &ConditionalPlan, tol: f64) -> Result<ConditionalGate> {
    let report_up = extract_gate(&cp.plan_up, tol)?;
    let report_down = extract_gate(&cp.plan_down, tol)?;

    let raw = sequence_propagator(&cp.control_steps())?;
    let mut phases = [C64::new(1.0, 0.0); 6];
    for (spin, report) in [(Spin::Up, &report_up), (Spin::Down, &report_down)] {
        for level in 0..3 {
            phases[3 * spin.index() + level] = C64::from_polar(1.0, -report.dark_phase);
        }
    }
    let full = &raw * &Operator::from_diagonal(&phases);
    let gate = full.submatrix(&COMPUTATIONAL);
    Ok(ConditionalGate { full, gate, report_up, report_down })
}

impl ConditionalGate {
    /// Norm of the entries coupling the two spin blocks.
    pub fn off_block_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                if i / 3 != j / 3 {
                    s += self.full.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    pub fn to_json(&self) -> Result<serde_json::Value> {
        let ent = is_entangling(&self.gate)?;
        let gate: Vec<[f64; 2]> = self.gate.to_row_major().iter().map(|z| [z.re, z.im]).collect();
        Ok(json!({
            "gate": gate,
            "entangling": ent.entangling,
            "concurrence": ent.measure,
            "off_block_norm": self.off_block_norm(),
            "up": self.report_up.to_json(),
            "down": self.report_down.to_json(),
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entanglement {
    pub entangling: bool,
    /// Largest output concurrence over the |±⟩⊗|±⟩ probes.
    pub measure: f64,
}

/// Concurrence 2|ad − bc| of a pure two-qubit state (a, b, c, d).
pub fn concurrence(state: &Ket) -> f64 {
    let a = state.amplitudes();
    2.0 * (a[0] * a[3] - a[1] * a[2]).norm()
}

/// Flags 4×4 gates that turn a product |±⟩⊗|±⟩ input into an entangled
/// output.
pub fn is_entangling(gate: &Operator) -> Result<Entanglement> {
    if gate.dim() != 4 || !gate.is_unitary(1e-8) {
        return Err(Error::InvalidOperator("expected a 4x4 unitary".into()));
    }
    let measure = [1.0, -1.0]
        .iter()
        .flat_map(|&s1| [1.0, -1.0].map(|s2| (s1, s2)))
        .map(|(s1, s2)| {
            let probe = Ket::from_real(&[0.5, 0.5 * s2, 0.5 * s1, 0.5 * s1 * s2]);
            concurrence(&gate.apply(&probe))
        })
        .fold(0.0, f64::max);
    Ok(Entanglement { entangling: measure > 1e-6, measure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::BrightFrame;
    use crate::operators::frobenius_distance;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn conditional_hamiltonian_blocks() {
        let seg = SegmentSpec::new(BrightFrame::computational(), 1.0, 0.0, 0.0, 1.0).unwrap();
        let h = conditional_hamiltonian(Spin::Up, &seg);
        let mut expected = Operator::zeros(6);
        expected.set(2, 0, C64::new(1.0, 0.0));
        expected.set(0, 2, C64::new(1.0, 0.0));
        assert_eq!(h, expected);
        assert_eq!(h.submatrix(&[3, 4, 5]), Operator::zeros(3));

        let seg = SegmentSpec::new(BrightFrame::new(0.4, 2.0).unwrap(), 0.7, -0.2, 1.0, 1.0).unwrap();
        let h = conditional_hamiltonian(Spin::Down, &seg);
        assert!(h.is_hermitian(1e-12));
        assert_eq!(h.submatrix(&[0, 1, 2]), Operator::zeros(3));
        assert!(frobenius_distance(&h.submatrix(&[3, 4, 5]), &hamiltonian(&seg)).unwrap() == 0.0);
    }

    #[test]
    fn local_gate_is_not_entangling() {
        let u = Operator::from_rows(
            2,
            &[C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.8), C64::new(0.6, 0.0)],
        )
        .unwrap();
        let g = Operator::identity(2).kron(&u);
        let e = is_entangling(&g).unwrap();
        assert!(!e.entangling && e.measure <= 1e-12);
    }

    #[test]
    fn controlled_phase_is_maximally_entangling() {
        let cz = Operator::from_real_diagonal(&[-1.0, 1.0, 1.0, 1.0]);
        let e = is_entangling(&cz).unwrap();
        assert!(e.entangling);
        assert!((e.measure - 1.0).abs() < 1e-12);
        let out = cz.apply(&Ket::from_real(&[0.5; 4]));
        assert!((concurrence(&out) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unitary() {
        assert!(is_entangling(&Operator::zeros(4)).is_err());
        assert!(is_entangling(&Operator::identity(3)).is_err());
    }

    #[test]
    fn controlled_phase_from_plans() {
        let f = BrightFrame::computational();
        let pi = PathPlan::new(f, vec![SegmentSpec::from_angles(f, PI, FRAC_PI_2, 1.0, 0.0).unwrap()]).unwrap();
        let idle = PathPlan::new(f, vec![SegmentSpec::from_angles(f, 2.0 * PI, FRAC_PI_2, 1.0, 0.0).unwrap()]).unwrap();
        let g = compose_conditional_gate(&ConditionalPlan { plan_up: pi, plan_down: idle }, 1e-8).unwrap();
        let cz = Operator::from_real_diagonal(&[-1.0, 1.0, 1.0, 1.0]);
        assert!(frobenius_distance(&g.gate, &cz).unwrap() < 1e-10);
        assert!(g.off_block_norm() < 1e-12);
    }
}
