//! The three-level Λ system in its rotating frame.
//!
//! Both ground states couple to |e⟩ with a common detuning Δ, so only the
//! bright combination |b⟩ = cosθ|0⟩ + sinθe^{iφ}|1⟩ is driven:
//!
//! ```text
//! H = Δ|e⟩⟨e| + Ω(e^{iφ_L}|e⟩⟨b| + h.c.)
//! ```
//!
//! The dark state |d⟩ = sinθ|0⟩ − cosθe^{iφ}|1⟩ is annihilated by H.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::operators::{wrap_angle, Ket, Operator, C64, ZERO};
use crate::{Error, Result};

pub const LEVEL_0: usize = 0;
pub const LEVEL_1: usize = 1;
pub const LEVEL_E: usize = 2;

/// Orientation of the bright state inside span{|0⟩, |1⟩}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrightFrame {
    pub theta: f64,
    pub phi: f64,
}

impl BrightFrame {
    /// θ ∈ [0, π/2]; φ is reduced into [0, 2π).
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidArgument("non-finite frame angle".into()));
        }
        if !(-1e-12..=FRAC_PI_2 + 1e-12).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "theta {theta} outside [0, pi/2]"
            )));
        }
        Ok(Self {
            theta: theta.clamp(0.0, FRAC_PI_2),
            phi: wrap_angle(phi),
        })
    }

    pub fn computational() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.theta, self.phi).map(|_| ())
    }

    pub fn bright(&self) -> Ket {
        bright_dark(self).0
    }

    pub fn dark(&self) -> Ket {
        bright_dark(self).1
    }
}

/// Returns (|b⟩, |d⟩) for the frame.
pub fn bright_dark(frame: &BrightFrame) -> (Ket, Ket) {
    let (s, c) = frame.theta.sin_cos();
    let e = C64::from_polar(1.0, frame.phi);
    let b = Ket::new(&[C64::new(c, 0.0), e * s, ZERO]);
    let d = Ket::new(&[C64::new(s, 0.0), -e * c, ZERO]);
    (b, d)
}

/// One square pulse of constant detuning, amplitude and phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub theta: f64,
    pub phi: f64,
    pub omega: f64,
    pub delta: f64,
    pub laser_phase: f64,
    pub tau: f64,
}

impl SegmentSpec {
    pub fn new(frame: BrightFrame, omega: f64, delta: f64, laser_phase: f64, tau: f64) -> Result<Self> {
        let seg = Self {
            theta: frame.theta,
            phi: wrap_angle(frame.phi),
            omega,
            delta,
            laser_phase: wrap_angle(laser_phase),
            tau,
        };
        seg.validate()?;
        Ok(seg)
    }

    /// Segment with prescribed rotation angle ϑ and mixing angle η at Rabi
    /// amplitude `omega`; detuning and duration follow from
    /// tanη = 2Ω/Δ and ϑ = √((Δ/2)² + Ω²)·τ.
    pub fn from_angles(
        frame: BrightFrame,
        vartheta: f64,
        eta: f64,
        omega: f64,
        laser_phase: f64,
    ) -> Result<Self> {
        if !(eta > 0.0 && eta < PI) || omega <= 0.0 || vartheta <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "need eta in (0, pi), omega > 0, vartheta > 0 (got {eta}, {omega}, {vartheta})"
            )));
        }
        let w = omega / eta.sin();
        let cos_eta = eta.cos();
        // keep resonant segments exactly resonant
        let delta = if cos_eta.abs() < 1e-15 { 0.0 } else { 2.0 * w * cos_eta };
        Self::new(frame, omega, delta, laser_phase, vartheta / w)
    }

    pub fn validate(&self) -> Result<()> {
        self.frame_unchecked().validate()?;
        let finite = [self.omega, self.delta, self.laser_phase, self.tau]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("non-finite segment field".into()));
        }
        if self.omega < 0.0 {
            return Err(Error::InvalidArgument(format!("negative omega {}", self.omega)));
        }
        if self.tau <= 0.0 {
            return Err(Error::InvalidArgument(format!("non-positive tau {}", self.tau)));
        }
        Ok(())
    }

    fn frame_unchecked(&self) -> BrightFrame {
        BrightFrame { theta: self.theta, phi: self.phi }
    }

    pub fn frame(&self) -> BrightFrame {
        self.frame_unchecked()
    }

    /// Generalized Rabi frequency √((Δ/2)² + Ω²).
    pub fn effective_frequency(&self) -> f64 {
        (0.5 * self.delta).hypot(self.omega)
    }

    /// Effective rotation angle ϑ of the bright state on its Bloch sphere.
    pub fn vartheta(&self) -> f64 {
        self.effective_frequency() * self.tau
    }

    /// Mixing angle η = atan2(2Ω, Δ). Idle segments (Ω = Δ = 0) get 0.
    pub fn eta(&self) -> f64 {
        if self.omega == 0.0 && self.delta == 0.0 {
            0.0
        } else {
            (2.0 * self.omega).atan2(self.delta)
        }
    }

    /// Rebuilds a segment from a Hamiltonian of the Λ form, or fails if the
    /// Hamiltonian couples the ground states among themselves.
    pub fn from_hamiltonian(h: &Operator, tau: f64, tol: f64) -> Result<Self> {
        if h.dim() != 3 || !h.is_hermitian(1e-12) {
            return Err(Error::InvalidOperator("expected a 3x3 Hermitian operator".into()));
        }
        let scale = h.max_abs().max(1.0);
        for (i, j) in [(0, 0), (0, 1), (1, 1)] {
            if h.get(i, j).norm() > tol * scale {
                return Err(Error::InvalidOperator(format!(
                    "ground-state block entry ({i},{j}) is nonzero"
                )));
            }
        }
        let delta = h.get(LEVEL_E, LEVEL_E).re;
        // ⟨e|H|j⟩ = Ω e^{iφ_L} ⟨b|j⟩, with ⟨b| = (cosθ, sinθ e^{−iφ})
        let c0 = h.get(LEVEL_E, LEVEL_0);
        let c1 = h.get(LEVEL_E, LEVEL_1);
        let omega = c0.norm().hypot(c1.norm());
        let theta = c1.norm().atan2(c0.norm());
        let (laser_phase, phi) = if omega == 0.0 {
            (0.0, 0.0)
        } else if c0.norm() <= tol * omega {
            (c1.arg(), 0.0)
        } else if c1.norm() <= tol * omega {
            (c0.arg(), 0.0)
        } else {
            (c0.arg(), c0.arg() - c1.arg())
        };
        Self::new(BrightFrame::new(theta, phi)?, omega, delta, laser_phase, tau)
    }
}

/// Maps two physical drives onto a segment: Ω = √(Ω_{e0}² + Ω_{e1}²),
/// tanθ = Ω_{e1}/Ω_{e0}, φ = φ₀ − φ₁, laser phase φ₀.
pub fn from_physical(
    omega_e0: f64,
    omega_e1: f64,
    phi0: f64,
    phi1: f64,
    delta: f64,
    tau: f64,
) -> Result<SegmentSpec> {
    if omega_e0 < 0.0 || omega_e1 < 0.0 {
        return Err(Error::InvalidArgument("negative Rabi amplitude".into()));
    }
    if omega_e0 == 0.0 && omega_e1 == 0.0 {
        return Err(Error::DegenerateSegment);
    }
    let frame = BrightFrame::new(omega_e1.atan2(omega_e0), phi0 - phi1)?;
    SegmentSpec::new(frame, omega_e0.hypot(omega_e1), delta, phi0, tau)
}

/// Rotating-frame Hamiltonian of a segment.
pub fn hamiltonian(seg: &SegmentSpec) -> Operator {
    let b = seg.frame().bright();
    let e = Ket::basis(3, LEVEL_E);
    let coupling = Operator::outer(&e, &b).scale(C64::from_polar(seg.omega, seg.laser_phase));
    let mut h = &coupling + &coupling.adjoint();
    h.set(LEVEL_E, LEVEL_E, C64::new(seg.delta, 0.0));
    h
}

/// V₂(t)V₁†(t) for consecutive rotating frames with detunings Δ₁, Δ₂ at
/// boundary time t: diag(e^{i(Δ₂−Δ₁)t}, e^{i(Δ₂−Δ₁)t}, 1).
pub fn frame_change(delta1: f64, delta2: f64, t: f64) -> Operator {
    let p = C64::from_polar(1.0, (delta2 - delta1) * t);
    Operator::from_diagonal(&[p, p, C64::new(1.0, 0.0)])
}

/// Coefficients (c_e, c_b, c_d) of a normalized qutrit state.
pub fn decompose(state: &Ket, frame: &BrightFrame) -> Result<(C64, C64, C64)> {
    if state.dim() != 3 {
        return Err(Error::InvalidState(format!("expected dimension 3, got {}", state.dim())));
    }
    if !state.is_normalized(1e-12) {
        return Err(Error::InvalidState(format!("norm {} != 1", state.norm())));
    }
    let (b, d) = bright_dark(frame);
    Ok((state.amplitude(LEVEL_E), b.inner(state), d.inner(state)))
}
