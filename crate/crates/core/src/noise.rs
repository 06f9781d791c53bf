//! Lindblad simulation of gate execution under decay and dephasing.
//!
//! Jump operators are √γ_{e0}|0⟩⟨e|, √γ_{e1}|1⟩⟨e| for spontaneous decay and
//! √κ_x|x⟩⟨x| for pure dephasing of each level. Integration is classical
//! RK4 on the density matrix; pulses and frame compensations act as
//! instantaneous unitaries.

use serde::{Deserialize, Serialize};

use crate::holonomy::{simulate_report, total_rotation_angle};
use crate::lambda::{LEVEL_0, LEVEL_1, LEVEL_E};
use crate::operators::{Operator, C64};
use crate::propagation::{ControlSequence, ControlStep, PathPlan, DEFAULT_SAMPLES_PER_SEGMENT};
use crate::{Error, Result};

/// Markovian decay and dephasing rates, in units of the reference frequency.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    #[serde(default)]
    pub gamma_e0: f64,
    #[serde(default)]
    pub gamma_e1: f64,
    #[serde(default)]
    pub kappa_0: f64,
    #[serde(default)]
    pub kappa_1: f64,
    #[serde(default)]
    pub kappa_e: f64,
}

impl NoiseModel {
    pub fn decay(gamma_e0: f64, gamma_e1: f64) -> Self {
        Self { gamma_e0, gamma_e1, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [self.gamma_e0, self.gamma_e1, self.kappa_0, self.kappa_1, self.kappa_e];
        if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidArgument(format!("noise rates must be finite and >= 0: {rates:?}")));
        }
        Ok(())
    }

    pub fn total_rate(&self) -> f64 {
        self.gamma_e0 + self.gamma_e1 + self.kappa_0 + self.kappa_1 + self.kappa_e
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            gamma_e0: self.gamma_e0 * factor,
            gamma_e1: self.gamma_e1 * factor,
            kappa_0: self.kappa_0 * factor,
            kappa_1: self.kappa_1 * factor,
            kappa_e: self.kappa_e * factor,
        }
    }

    /// Nonzero jump operators on the qutrit.
    pub fn jump_operators(&self) -> Vec<Operator> {
        let terms = [
            (self.gamma_e0, LEVEL_0, LEVEL_E),
            (self.gamma_e1, LEVEL_1, LEVEL_E),
            (self.kappa_0, LEVEL_0, LEVEL_0),
            (self.kappa_1, LEVEL_1, LEVEL_1),
            (self.kappa_e, LEVEL_E, LEVEL_E),
        ];
        terms
            .iter()
            .filter(|(rate, _, _)| *rate > 0.0)
            .map(|&(rate, i, j)| Operator::unit(3, i, j).scale(C64::new(rate.sqrt(), 0.0)))
            .collect()
    }
}

/// Density matrix of the qutrit.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(pub Operator);

impl DensityMatrix {
    pub fn pure(ket: &crate::Ket) -> Self {
        Self(Operator::outer(ket, ket))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0.eigenvalues_hermitian()[0]
    }

    /// Hermitian within 1e−10, unit trace within 1e−8, eigenvalues ≥ −1e−8.
    pub fn validate(&self) -> Result<()> {
        if !self.0.is_hermitian(1e-10) {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        if (self.trace() - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidState(format!("trace {} != 1", self.trace())));
        }
        if self.min_eigenvalue() < -1e-8 {
            return Err(Error::InvalidState("density matrix has a negative eigenvalue".into()));
        }
        Ok(())
    }
}

struct Generator {
    /// H − (i/2) Σ L†L
    h_eff: Operator,
    h_eff_dag: Operator,
    jumps: Vec<(Operator, Operator)>,
}

impl Generator {
    fn new(h: &Operator, noise: &NoiseModel) -> Self {
        let mut h_eff = h.clone();
        let jumps = noise
            .jump_operators()
            .into_iter()
            .map(|l| {
                let ld = l.adjoint();
                h_eff = &h_eff - &(&ld * &l).scale(C64::new(0.0, 0.5));
                (l, ld)
            })
            .collect();
        Self { h_eff_dag: h_eff.adjoint(), h_eff, jumps }
    }

    /// −i(H_eff ρ − ρ H_eff†) + Σ LρL†, equal to −i[H, ρ] + Σ (LρL† − ½{L†L, ρ})
    fn apply(&self, rho: &Operator) -> Operator {
        let mut out = (&(&self.h_eff * rho) - &(rho * &self.h_eff_dag)).scale(C64::new(0.0, -1.0));
        for (l, ld) in &self.jumps {
            out = &out + &(&(l * rho) * ld);
        }
        out
    }

    fn rk4(&self, rho: &Operator, dt: f64) -> Operator {
        let half = C64::new(0.5 * dt, 0.0);
        let k1 = self.apply(rho);
        let k2 = self.apply(&(rho + &k1.scale(half)));
        let k3 = self.apply(&(rho + &k2.scale(half)));
        let k4 = self.apply(&(rho + &k3.scale(C64::new(dt, 0.0))));
        let sum = &(&k1 + &k2.scale(C64::new(2.0, 0.0))) + &(&k3.scale(C64::new(2.0, 0.0)) + &k4);
        rho + &sum.scale(C64::new(dt / 6.0, 0.0))
    }
}

/// Largest step accepted by [`lindblad_step`]: 0.01 / max(‖H‖₂, Σ rates).
pub fn max_step(h: &Operator, noise: &NoiseModel) -> f64 {
    let scale = h.spectral_radius_hermitian().max(noise.total_rate());
    if scale > 0.0 { 0.01 / scale } else { f64::INFINITY }
}

/// One RK4 step of the Lindblad equation.
pub fn lindblad_step(rho: &DensityMatrix, h: &Operator, noise: &NoiseModel, dt: f64) -> Result<DensityMatrix> {
    noise.validate()?;
    let max = max_step(h, noise);
    if !(dt > 0.0) || dt > max * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, max });
    }
    Ok(DensityMatrix(Generator::new(h, noise).rk4(&rho.0, dt)))
}

/// Default integration step for a sequence: min τ/200, capped by the
/// stability bound of every segment.
pub fn default_dt(steps: &[ControlStep], noise: &NoiseModel) -> f64 {
    steps
        .iter()
        .filter_map(|s| match s {
            ControlStep::Evolve { hamiltonian, tau } => Some((tau / 200.0).min(max_step(hamiltonian, noise))),
            ControlStep::Pulse(_) => None,
        })
        .fold(f64::INFINITY, f64::min)
}

/// Integrates ρ through a sequence; each evolution is split into equal
/// substeps no longer than `dt`.
pub fn propagate_density(rho: &DensityMatrix, steps: &[ControlStep], noise: &NoiseModel, dt: f64) -> Result<DensityMatrix> {
    noise.validate()?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("invalid time step {dt}")));
    }
    let mut state = rho.0.clone();
    for step in steps {
        match step {
            ControlStep::Pulse(u) => state = &(u * &state) * &u.adjoint(),
            ControlStep::Evolve { hamiltonian, tau } => {
                let max = max_step(hamiltonian, noise);
                if dt > max * (1.0 + 1e-12) {
                    return Err(Error::StepTooLarge { dt, max });
                }
                let n = (tau / dt).ceil().max(1.0) as usize;
                let h = tau / n as f64;
                let gen = Generator::new(hamiltonian, noise);
                for _ in 0..n {
                    state = gen.rk4(&state, h);
                }
            }
        }
    }
    Ok(DensityMatrix(state))
}

/// A channel on span{|0⟩,|1⟩} described by the images of |i⟩⟨j| on the
/// full qutrit.
#[derive(Debug, Clone)]
pub struct QubitChannel {
    /// outputs[i][j] = E(|i⟩⟨j|), 3×3.
    pub outputs: [[Operator; 2]; 2],
}

impl QubitChannel {
    /// Conjugation by a 2×2 unitary, embedded in the qutrit.
    pub fn from_unitary(u: &Operator) -> Self {
        let mut full = Operator::identity(3);
        for i in 0..2 {
            for j in 0..2 {
                full.set(i, j, u.get(i, j));
            }
        }
        let out = |i, j| &(&full * &Operator::unit(3, i, j)) * &full.adjoint();
        Self { outputs: [[out(0, 0), out(0, 1)], [out(1, 0), out(1, 1)]] }
    }

    /// E(ρ) = tr(ρ) I/2
    pub fn depolarizing() -> Self {
        let half = Operator::from_real_diagonal(&[0.5, 0.5, 0.0]);
        let zero = Operator::zeros(3);
        Self { outputs: [[half.clone(), zero.clone()], [zero, half]] }
    }

    /// 2×2 block of E(|i⟩⟨j|) on the computational subspace.
    pub fn block(&self, i: usize, j: usize) -> Operator {
        self.outputs[i][j].submatrix(&[0, 1])
    }

    /// Population lost from span{|0⟩,|1⟩}, averaged over |0⟩ and |1⟩.
    pub fn leakage(&self) -> f64 {
        1.0 - 0.5 * (self.block(0, 0).trace().re + self.block(1, 1).trace().re)
    }

    /// Choi matrix Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|) on the full qutrit output.
    pub fn choi(&self) -> Operator {
        let mut c = Operator::zeros(6);
        for i in 0..2 {
            for j in 0..2 {
                let o = &self.outputs[i][j];
                for a in 0..3 {
                    for b in 0..3 {
                        c.set(3 * i + a, 3 * j + b, o.get(a, b));
                    }
                }
            }
        }
        c
    }

    /// Completely positive and trace preserving on the qutrit, within tol.
    pub fn is_cptp(&self, tol: f64) -> bool {
        let choi = self.choi();
        let positive = choi.is_hermitian(tol) && choi.eigenvalues_hermitian()[0] >= -tol;
        let tp = (0..2).all(|i| {
            (0..2).all(|j| {
                let expect = if i == j { 1.0 } else { 0.0 };
                (self.outputs[i][j].trace() - C64::new(expect, 0.0)).norm() <= tol
            })
        });
        positive && tp
    }
}

/// Runs the four basis operators |i⟩⟨j| through a noisy schedule.
///
/// `dt` defaults to [`default_dt`].
pub fn noisy_gate_channel<S: ControlSequence + ?Sized>(
    schedule: &S,
    noise: &NoiseModel,
    dt: Option<f64>,
) -> Result<QubitChannel> {
    let steps = schedule.control_steps();
    let dt = dt.unwrap_or_else(|| default_dt(&steps, noise));
    let run = |i, j| propagate_density(&DensityMatrix(Operator::unit(3, i, j)), &steps, noise, dt).map(|d| d.0);
    Ok(QubitChannel { outputs: [[run(0, 0)?, run(0, 1)?], [run(1, 0)?, run(1, 1)?]] })
}

/// Average gate fidelity F̄ = (2F_pro + 1)/3 with
/// F_pro = ¼ Σ_ij ⟨i|U†E(|i⟩⟨j|)U|j⟩; leakage out of the qubit counts as error.
pub fn average_gate_fidelity(channel: &QubitChannel, ideal: &Operator) -> f64 {
    let ud = ideal.adjoint();
    let mut f_pro = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let m = &(&ud * &channel.block(i, j)) * ideal;
            f_pro += m.get(i, j).re;
        }
    }
    (2.0 * 0.25 * f_pro + 1.0) / 3.0
}

/// Fidelities of two plans under the same noise, each against its own
/// ideal gate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathComparison {
    pub fidelity_short: f64,
    pub fidelity_reference: f64,
    pub total_angle_short: f64,
    pub total_angle_reference: f64,
    pub duration_short: f64,
    pub duration_reference: f64,
    pub noise: NoiseModel,
    pub dt: f64,
}

fn plan_fidelity(plan: &PathPlan, noise: &NoiseModel, dt: f64) -> Result<f64> {
    let ideal = simulate_report(plan, DEFAULT_SAMPLES_PER_SEGMENT)?.computational_gate();
    let channel = noisy_gate_channel(plan, noise, Some(dt))?;
    Ok(average_gate_fidelity(&channel, &ideal))
}

/// Simulates both plans with a common step size `dt` (default: the
/// smaller of the two plans' defaults).
pub fn compare_paths(
    short_plan: &PathPlan,
    reference_plan: &PathPlan,
    noise: &NoiseModel,
    dt: Option<f64>,
) -> Result<PathComparison> {
    noise.validate()?;
    let dt = dt.unwrap_or_else(|| {
        default_dt(&short_plan.control_steps(), noise).min(default_dt(&reference_plan.control_steps(), noise))
    });
    Ok(PathComparison {
        fidelity_short: plan_fidelity(short_plan, noise, dt)?,
        fidelity_reference: plan_fidelity(reference_plan, noise, dt)?,
        total_angle_short: total_rotation_angle(short_plan),
        total_angle_reference: total_rotation_angle(reference_plan),
        duration_short: short_plan.total_duration(),
        duration_reference: reference_plan.total_duration(),
        noise: *noise,
        dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{hamiltonian, BrightFrame, SegmentSpec};
    use crate::operators::{expm_hermitian, frobenius_distance, Ket};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn evolve(rho: &DensityMatrix, h: &Operator, noise: &NoiseModel, t: f64, dt: f64) -> DensityMatrix {
        let steps = [ControlStep::Evolve { hamiltonian: h.clone(), tau: t }];
        propagate_density(rho, &steps, noise, dt).unwrap()
    }

    #[test]
    fn noiseless_matches_unitary() {
        let seg = SegmentSpec::new(BrightFrame::new(0.4, 0.3).unwrap(), 1.0, 0.5, 0.2, 1.3).unwrap();
        let h = hamiltonian(&seg);
        let rho0 = DensityMatrix::pure(&Ket::from_real(&[0.6, 0.8, 0.0]));
        let out = evolve(&rho0, &h, &NoiseModel::default(), seg.tau, 0.005);
        let u = expm_hermitian(&h, seg.tau).unwrap();
        let exact = &(&u * &rho0.0) * &u.adjoint();
        assert!(frobenius_distance(&out.0, &exact).unwrap() < 1e-8);
    }

    #[test]
    fn excited_state_decay() {
        let gamma = 0.5;
        let noise = NoiseModel::decay(gamma, 0.0);
        let rho0 = DensityMatrix::pure(&Ket::basis(3, 2));
        let t = 2.0;
        let out = evolve(&rho0, &Operator::zeros(3), &noise, t, 0.01);
        assert!((out.0.get(2, 2).re - (-gamma * t).exp()).abs() < 1e-6);
        assert!((out.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dephasing_of_ground_coherence() {
        let (k0, k1) = (0.3, 0.1);
        let noise = NoiseModel { kappa_0: k0, kappa_1: k1, ..Default::default() };
        let rho0 = DensityMatrix::pure(&Ket::from_real(&[0.5f64.sqrt(), 0.5f64.sqrt(), 0.0]));
        let t = 3.0;
        let coarse = evolve(&rho0, &Operator::zeros(3), &noise, t, 0.02);
        let fine = evolve(&rho0, &Operator::zeros(3), &noise, t, 0.0002);
        let analytic = 0.5 * (-(k0 + k1) * t / 2.0).exp();
        assert!((coarse.0.get(0, 1).re - analytic).abs() < 1e-8);
        assert!((fine.0.get(0, 1).re - analytic).abs() < 1e-10);
        // populations untouched
        assert!((coarse.0.get(0, 0).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn step_bound_enforced() {
        let h = Operator::from_real_diagonal(&[0.0, 0.0, 2.0]);
        let rho = DensityMatrix::pure(&Ket::basis(3, 0));
        assert!(matches!(
            lindblad_step(&rho, &h, &NoiseModel::default(), 0.01),
            Err(Error::StepTooLarge { .. })
        ));
        assert!(lindblad_step(&rho, &h, &NoiseModel::default(), 0.005).is_ok());
    }

    #[test]
    fn fidelity_oracles() {
        let id = Operator::identity(2);
        assert!((average_gate_fidelity(&QubitChannel::from_unitary(&id), &id) - 1.0).abs() < 1e-12);
        let z = Operator::from_real_diagonal(&[1.0, -1.0]);
        assert!((average_gate_fidelity(&QubitChannel::from_unitary(&z), &id) - 1.0 / 3.0).abs() < 1e-12);
        let h = Operator::from_rows(2, &[1.0, 1.0, 1.0, -1.0].map(|x: f64| C64::new(x / 2f64.sqrt(), 0.0))).unwrap();
        assert!((average_gate_fidelity(&QubitChannel::depolarizing(), &h) - 0.5).abs() < 1e-12);
        // global phase of the ideal does not matter
        let zi = z.scale(C64::from_polar(1.0, 0.9));
        assert!((average_gate_fidelity(&QubitChannel::from_unitary(&z), &zi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decay_causes_trace_loss() {
        let f = BrightFrame::computational();
        let plan = PathPlan::new(f, vec![SegmentSpec::from_angles(f, PI, FRAC_PI_2, 1.0, 0.0).unwrap()]).unwrap();
        let channel = noisy_gate_channel(&plan, &NoiseModel::decay(1e-3, 1e-3), None).unwrap();
        // decay from |e⟩ lands in |0⟩ or |1⟩; population in the block is conserved but coherence is not
        assert!(channel.is_cptp(1e-8));
        let ideal = simulate_report(&plan, 16).unwrap().computational_gate();
        let f_noisy = average_gate_fidelity(&channel, &ideal);
        assert!(f_noisy < 1.0 && f_noisy > 0.99);
    }
}
