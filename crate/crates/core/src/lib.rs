//! Design and verification of nonadiabatic holonomic gates in three-level
//! Λ systems.
//!
//! A gate is realized by driving the transitions |0⟩↔|e⟩ and |1⟩↔|e⟩ with a
//! sequence of square pulses ([`SegmentSpec`]) collected into a [`PathPlan`].
//! When consecutive segments satisfy the matching conditions
//! ([`holonomy::match_rotation_angle`], [`holonomy::match_phase`]) the
//! computational subspace span{|0⟩,|1⟩} returns to itself and the acquired
//! transformation is purely geometric:
//!
//! ```text
//! U = e^{iβ}|b⟩⟨b| + |d⟩⟨d|
//! ```
//!
//! Paths built this way can have a total effective rotation angle Σϑ below π,
//! the value every single-loop scheme is stuck with. The crate also covers
//! dynamical-decoupling interleaving ([`decoupling`]), conditional two-qubit
//! gates ([`twoqubit`]) and a Lindblad simulator for fidelity studies
//! ([`noise`]).
//!
//! Frequencies are expressed in units of a reference Rabi frequency and times
//! in its inverse. The single-qubit basis is ordered (|0⟩, |1⟩, |e⟩).

pub mod cli;
pub mod decoupling;
pub mod error;
pub mod holonomy;
pub mod lambda;
pub mod noise;
pub mod operators;
pub mod propagation;
pub mod twoqubit;

pub use error::{Error, Result};
pub use holonomy::{HolonomyReport, MatchSolution};
pub use lambda::{BrightFrame, SegmentSpec};
pub use operators::{Ket, Operator, C64};
pub use propagation::{PathPlan, Trajectory};

/// Numerical thresholds used by the checks in this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed ‖A†A − I‖_F for operators treated as unitary.
    pub unitarity: f64,
    /// Allowed relative ‖A − A†‖_F for operators treated as Hermitian.
    pub hermiticity: f64,
    /// Matching equalities between segment parameters.
    pub matching: f64,
    /// Cyclic and geometric residuals of simulated paths.
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: 1e-10,
            hermiticity: 1e-12,
            matching: 1e-12,
            residual: 1e-8,
        }
    }
}
