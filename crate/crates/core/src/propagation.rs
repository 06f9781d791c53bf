//! Segment propagators and evolution of the computational subspace along a
//! piecewise-constant pulse plan.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::lambda::{bright_dark, frame_change, hamiltonian, BrightFrame, SegmentSpec, LEVEL_E};
use crate::operators::{Ket, Operator, SpectralPropagator, C64, I};
use crate::{Error, Result, Tolerances};

/// Default number of samples taken inside each segment.
pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 64;

/// Ordered pulse segments acting on the subspace spanned by the initial
/// bright and dark states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathPlan {
    pub initial_frame: BrightFrame,
    pub segments: Vec<SegmentSpec>,
}

/// A step of a control sequence: free evolution under a constant
/// Hamiltonian, or an instantaneous unitary (frame compensation or pulse).
#[derive(Debug, Clone)]
pub enum ControlStep {
    Evolve { hamiltonian: Operator, tau: f64 },
    Pulse(Operator),
}

impl PathPlan {
    pub fn new(initial_frame: BrightFrame, segments: Vec<SegmentSpec>) -> Result<Self> {
        let plan = Self { initial_frame, segments };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        self.initial_frame.validate()?;
        if self.segments.is_empty() {
            return Err(Error::InvalidPlan("plan has no segments".into()));
        }
        for (k, seg) in self.segments.iter().enumerate() {
            seg.validate()
                .map_err(|e| Error::InvalidPlan(format!("segment {k}: {e}")))?;
        }
        Ok(())
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.tau).sum()
    }

    /// Absolute start time of every segment.
    pub fn start_times(&self) -> Vec<f64> {
        self.segments
            .iter()
            .scan(0.0, |t, s| {
                let start = *t;
                *t += s.tau;
                Some(start)
            })
            .collect()
    }

    /// Splits every segment into `pieces` equal parts. The dynamics are
    /// unchanged because consecutive pieces share their detuning.
    pub fn subdivided(&self, pieces: usize) -> Result<Self> {
        if pieces == 0 {
            return Err(Error::InvalidArgument("pieces must be positive".into()));
        }
        let segments = self
            .segments
            .iter()
            .flat_map(|s| {
                std::iter::repeat_n(SegmentSpec { tau: s.tau / pieces as f64, ..*s }, pieces)
            })
            .collect();
        Self::new(self.initial_frame, segments)
    }

    /// The plan as a sequence of evolutions interleaved with the frame
    /// compensation at every boundary.
    pub fn control_steps(&self) -> Vec<ControlStep> {
        let starts = self.start_times();
        let mut steps = Vec::with_capacity(2 * self.segments.len());
        for (k, seg) in self.segments.iter().enumerate() {
            if k > 0 {
                let prev = &self.segments[k - 1];
                if prev.delta != seg.delta {
                    steps.push(ControlStep::Pulse(frame_change(prev.delta, seg.delta, starts[k])));
                }
            }
            steps.push(ControlStep::Evolve { hamiltonian: hamiltonian(seg), tau: seg.tau });
        }
        steps
    }

    /// Full propagator including frame compensation.
    pub fn propagator(&self) -> Result<Operator> {
        sequence_propagator(&self.control_steps())
    }
}

/// Anything that can be executed as a sequence of [`ControlStep`]s.
pub trait ControlSequence {
    fn control_steps(&self) -> Vec<ControlStep>;
}

impl ControlSequence for PathPlan {
    fn control_steps(&self) -> Vec<ControlStep> {
        PathPlan::control_steps(self)
    }
}

/// Product of all steps, later steps on the left.
pub fn sequence_propagator(steps: &[ControlStep]) -> Result<Operator> {
    let mut u = Operator::identity(steps_dim(steps));
    for step in steps {
        let s = match step {
            ControlStep::Evolve { hamiltonian, tau } => {
                SpectralPropagator::new(hamiltonian, Tolerances::default().hermiticity)?.at(*tau)?
            }
            ControlStep::Pulse(p) => p.clone(),
        };
        u = &s * &u;
    }
    Ok(u)
}

pub(crate) fn steps_dim(steps: &[ControlStep]) -> usize {
    match steps.first() {
        Some(ControlStep::Evolve { hamiltonian, .. }) => hamiltonian.dim(),
        Some(ControlStep::Pulse(p)) => p.dim(),
        None => 3,
    }
}

/// Closed-form propagator e^{−iHτ} of one segment.
///
/// On the bright/excited pair the evolution is a rotation by ϑ about an axis
/// tilted by η; the dark state is untouched.
pub fn segment_propagator(seg: &SegmentSpec) -> Operator {
    let (b, d) = bright_dark(&seg.frame());
    let e = Ket::basis(3, LEVEL_E);
    let vt = seg.vartheta();
    let eta = seg.eta();
    let (s, c) = vt.sin_cos();
    let global = C64::from_polar(1.0, -0.5 * seg.delta * seg.tau);
    let rot_b = C64::new(c, s * eta.cos());
    let rot_e = C64::new(c, -s * eta.cos());
    let off = -I * s * eta.sin();

    let u_b = (b.scale(rot_b) + e.scale(off * C64::from_polar(1.0, seg.laser_phase))).scale(global);
    let u_e = (b.scale(off * C64::from_polar(1.0, -seg.laser_phase)) + e.scale(rot_e)).scale(global);
    &(&Operator::outer(&d, &d) + &Operator::outer(&u_b, &b)) + &Operator::outer(&u_e, &e)
}

/// Moves a basis pair from the rotating frame with detuning `delta_prev`
/// into the frame with `delta_next` at boundary time `t_boundary`.
pub fn compensated_handoff(
    basis: (&Ket, &Ket),
    delta_prev: f64,
    delta_next: f64,
    t_boundary: f64,
) -> (Ket, Ket) {
    let f = frame_change(delta_prev, delta_next, t_boundary);
    (f.apply(basis.0), f.apply(basis.1))
}

#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub time: f64,
    pub segment: usize,
    /// Evolved images of |b₁⟩ and |d₁⟩.
    pub basis: [Ket; 2],
}

impl TrajectorySample {
    pub fn projector(&self) -> Operator {
        &Operator::outer(&self.basis[0], &self.basis[0])
            + &Operator::outer(&self.basis[1], &self.basis[1])
    }
}

/// Sampled evolution of the computational subspace along a plan.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    /// Phase (Δ_{k+1} − Δ_k)·t_k applied to span{|0⟩,|1⟩} at each boundary.
    pub compensation_phases: Vec<f64>,
    pub initial_frame: BrightFrame,
}

impl Trajectory {
    pub fn initial(&self) -> &TrajectorySample {
        &self.samples[0]
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory has samples")
    }

    /// Writes `time,segment` followed by Re/Im of every amplitude of both
    /// basis states.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        let dim = self.samples[0].basis[0].dim();
        let mut header = vec!["time".to_string(), "segment".to_string()];
        for state in ["b", "d"] {
            for i in 0..dim {
                let level = if dim == 3 { ["0", "1", "e"][i].to_string() } else { i.to_string() };
                header.push(format!("re_{state}_{level}"));
                header.push(format!("im_{state}_{level}"));
            }
        }
        w.write_record(&header)?;
        for s in &self.samples {
            let mut row = vec![s.time.to_string(), s.segment.to_string()];
            for ket in &s.basis {
                for a in ket.amplitudes() {
                    row.push(a.re.to_string());
                    row.push(a.im.to_string());
                }
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Evolves (|b₁⟩, |d₁⟩) through the plan, sampling each segment uniformly
/// at `samples_per_segment` points including both ends.
pub fn evolve_path(plan: &PathPlan, samples_per_segment: usize) -> Result<Trajectory> {
    plan.validate()?;
    if samples_per_segment < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples per segment".into()));
    }
    let (b, d) = bright_dark(&plan.initial_frame);
    let mut current = [b, d];
    let mut samples = Vec::with_capacity(samples_per_segment * plan.segments.len());
    let mut compensation_phases = Vec::new();
    let starts = plan.start_times();

    for (k, seg) in plan.segments.iter().enumerate() {
        if k > 0 {
            let prev = &plan.segments[k - 1];
            let (x, y) = compensated_handoff((&current[0], &current[1]), prev.delta, seg.delta, starts[k]);
            compensation_phases.push((seg.delta - prev.delta) * starts[k]);
            current = [x, y];
        }
        let prop = SpectralPropagator::new(&hamiltonian(seg), Tolerances::default().hermiticity)?;
        let start = current.clone();
        for n in 0..samples_per_segment {
            let t = seg.tau * n as f64 / (samples_per_segment - 1) as f64;
            let u = prop.at(t)?;
            let basis = [u.apply(&start[0]), u.apply(&start[1])];
            if n + 1 == samples_per_segment {
                current = basis.clone();
            }
            samples.push(TrajectorySample { time: starts[k] + t, segment: k, basis });
        }
    }

    Ok(Trajectory { samples, compensation_phases, initial_frame: plan.initial_frame })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{expm_hermitian, frobenius_distance};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn pi_pulse() -> PathPlan {
        let frame = BrightFrame::new(0.6, 1.2).unwrap();
        PathPlan::new(frame, vec![SegmentSpec::new(frame, 1.0, 0.0, 0.3, PI).unwrap()]).unwrap()
    }

    #[test]
    fn closed_form_matches_spectral() {
        let frame = BrightFrame::new(0.4, 2.0).unwrap();
        for &(omega, delta, tau) in &[(1.0, 0.0, 1.0), (0.7, -1.3, 2.2), (0.0, 0.9, 1.5), (2.0, 3.0, 0.4)] {
            let seg = SegmentSpec::new(frame, omega, delta, 0.77, tau).unwrap();
            let a = segment_propagator(&seg);
            let b = expm_hermitian(&hamiltonian(&seg), tau).unwrap();
            assert!(frobenius_distance(&a, &b).unwrap() < 1e-12);
        }
    }

    #[test]
    fn resonant_pi_pulse_flips_bright_and_excited() {
        let frame = BrightFrame::new(0.3, 0.1).unwrap();
        let seg = SegmentSpec::new(frame, 1.0, 0.0, 0.0, PI).unwrap();
        let u = segment_propagator(&seg);
        let (b, d) = bright_dark(&frame);
        let e = Ket::basis(3, LEVEL_E);
        assert!((u.apply(&b) + b.clone()).norm() < 1e-12);
        assert!((u.apply(&e) + e.clone()).norm() < 1e-12);
        assert!((u.apply(&d) - d.clone()).norm() < 1e-15);
        assert!((seg.eta() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn detuning_only_segment() {
        let seg = SegmentSpec::new(BrightFrame::computational(), 0.0, 0.8, 0.0, 1.25).unwrap();
        let u = segment_propagator(&seg);
        let expected = Operator::from_diagonal(&[
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::from_polar(1.0, -0.8 * 1.25),
        ]);
        assert!(frobenius_distance(&u, &expected).unwrap() < 1e-14);
    }

    #[test]
    fn handoff_is_identity_for_equal_detunings() {
        let (b, d) = bright_dark(&BrightFrame::new(0.2, 0.3).unwrap());
        let (x, y) = compensated_handoff((&b, &d), 0.5, 0.5, 3.0);
        assert_eq!(x, b);
        assert_eq!(y, d);
        let (x, y) = compensated_handoff((&b, &d), 0.5, -0.2, 3.0);
        assert!((x.norm() - 1.0).abs() < 1e-12 && x.inner(&y).norm() < 1e-12);
    }

    #[test]
    fn single_pi_pulse_trajectory() {
        let plan = pi_pulse();
        let traj = evolve_path(&plan, 8).unwrap();
        assert_eq!(traj.samples.len(), 8);
        let (b, d) = bright_dark(&plan.initial_frame);
        let last = traj.last();
        assert!((last.basis[0].clone() + b).norm() < 1e-12);
        assert!((last.basis[1].clone() - d).norm() < 1e-12);
        assert!(frobenius_distance(&last.projector(), &traj.initial().projector()).unwrap() < 1e-12);
        assert!(evolve_path(&plan, 1).is_err());
    }

    #[test]
    fn subdividing_keeps_propagator() {
        let frame = BrightFrame::new(0.5, 0.5).unwrap();
        let plan = PathPlan::new(
            frame,
            vec![
                SegmentSpec::new(frame, 1.0, 0.7, 0.0, 0.9).unwrap(),
                SegmentSpec::new(frame, 0.5, -0.4, 1.0, 1.3).unwrap(),
            ],
        )
        .unwrap();
        let fine = plan.subdivided(3).unwrap();
        assert_eq!(fine.segments.len(), 6);
        let d = frobenius_distance(&plan.propagator().unwrap(), &fine.propagator().unwrap()).unwrap();
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn csv_has_fourteen_columns() {
        let traj = evolve_path(&pi_pulse(), 3).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines.iter().all(|l| l.split(',').count() == 14));
        assert!(lines[0].starts_with("time,segment,re_b_0"));
    }

    #[test]
    fn empty_plan_rejected() {
        assert!(matches!(
            PathPlan::new(BrightFrame::computational(), vec![]),
            Err(Error::InvalidPlan(_))
        ));
    }
}
