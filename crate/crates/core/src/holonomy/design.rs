//! Search for the shortest matched path realizing a target phase.
//!
//! For every (η₁, η₂) pair on the grids and both ϑ₂ branches, β is a
//! function of ϑ₁ alone. Roots of β(ϑ₁) − β_target are bracketed on a scan
//! and refined by bisection; the candidate with the smallest Σϑ wins.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use super::matching::{build_matched_pair, match_rotation_angle, Branch, SegmentAngles};
use super::{check_cyclic, check_geometric};
use crate::lambda::{BrightFrame, SegmentSpec};
use crate::operators::{angle_difference, wrap_angle, C64};
use crate::propagation::{PathPlan, DEFAULT_SAMPLES_PER_SEGMENT};
use crate::{Error, Result};

const SCAN_POINTS: usize = 512;
const BETA_TOL: f64 = 1e-6;
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DesignConstraints {
    /// Rabi amplitude used by every segment.
    pub omega_max: f64,
    /// Upper bound on the total duration, if any.
    pub tau_max: Option<f64>,
    pub frame: BrightFrame,
    /// Laser phase of the first segment.
    pub phi1: f64,
    /// Also consider single resonant-or-detuned loops with ϑ = π.
    pub allow_single_segment: bool,
}

impl Default for DesignConstraints {
    fn default() -> Self {
        Self {
            omega_max: 1.0,
            tau_max: None,
            frame: BrightFrame::computational(),
            phi1: 0.0,
            allow_single_segment: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Design {
    pub plan: PathPlan,
    pub beta: f64,
    pub total_angle: f64,
    pub eta1: f64,
    pub eta2: Option<f64>,
    pub branch: Option<Branch>,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    total: f64,
    eta1: f64,
    eta2: Option<f64>,
    theta1: f64,
    branch: Option<Branch>,
}

impl Candidate {
    fn segments(&self) -> usize {
        if self.eta2.is_some() { 2 } else { 1 }
    }

    fn cmp(&self, other: &Self) -> Ordering {
        if (self.total - other.total).abs() > TIE_TOL {
            return self.total.total_cmp(&other.total);
        }
        self.segments()
            .cmp(&other.segments())
            .then(self.eta1.total_cmp(&other.eta1))
            .then(self.eta2.unwrap_or(0.0).total_cmp(&other.eta2.unwrap_or(0.0)))
    }
}

/// Uniform grid of `n` mixing angles on [0.05, π − 0.05], plus π/2.
pub fn default_eta_grid(n: usize) -> Vec<f64> {
    let (lo, hi) = (0.05, PI - 0.05);
    let mut grid: Vec<f64> = (0..n)
        .map(|k| if n == 1 { 0.5 * PI } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
        .collect();
    if !grid.iter().any(|&x| (x - 0.5 * PI).abs() < 1e-12) {
        grid.push(0.5 * PI);
    }
    grid.sort_by(f64::total_cmp);
    grid
}

fn arg_term(vt: f64, eta: f64) -> f64 {
    C64::new(vt.cos(), vt.sin() * eta.cos()).arg() - vt * eta.cos()
}

/// (β, Σϑ) of the matched pair starting with ϑ₁, if the pair exists.
fn pair_beta(theta1: f64, eta1: f64, eta2: f64, branch: Branch) -> Option<(f64, f64)> {
    let theta2 = match_rotation_angle(theta1, eta1, eta2, branch).ok()?;
    Some((arg_term(theta1, eta1) + arg_term(theta2, eta2), theta1 + theta2))
}

fn duration(vt: f64, eta: f64, omega: f64) -> f64 {
    vt * eta.sin() / omega
}

fn roots_for(target: f64, eta1: f64, eta2: f64, branch: Branch, c: &DesignConstraints) -> Option<Candidate> {
    let err = |t: f64| pair_beta(t, eta1, eta2, branch).map(|(b, s)| (angle_difference(b, target), s));
    let fits = |t: f64, total: f64| -> bool {
        let Some(tmax) = c.tau_max else { return true };
        let theta2 = total - t;
        duration(t, eta1, c.omega_max) + duration(theta2, eta2, c.omega_max) <= tmax
    };

    let mut best: Option<Candidate> = None;
    let mut consider = |t: f64, total: f64| {
        if !fits(t, total) {
            return;
        }
        let cand = Candidate { total, eta1, eta2: Some(eta2), theta1: t, branch: Some(branch) };
        if best.is_none_or(|b| cand.cmp(&b) == Ordering::Less) {
            best = Some(cand);
        }
    };

    let scan: Vec<(f64, Option<(f64, f64)>)> = (1..SCAN_POINTS)
        .map(|k| {
            let t = TAU * k as f64 / SCAN_POINTS as f64;
            (t, err(t))
        })
        .collect();

    for w in scan.windows(2) {
        let (ta, Some((fa, sa))) = w[0] else { continue };
        if fa.abs() < BETA_TOL * 1e-3 {
            consider(ta, sa);
            continue;
        }
        let (tb, Some((fb, _))) = w[1] else { continue };
        if fa.signum() == fb.signum() || (fa - fb).abs() > 1.0 {
            continue;
        }
        let (mut lo, mut hi, mut flo) = (ta, tb, fa);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let Some((fm, _)) = err(mid) else { break };
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let root = 0.5 * (lo + hi);
        if let Some((f, total)) = err(root) {
            if f.abs() < BETA_TOL {
                consider(root, total);
            }
        }
    }
    best
}

/// Shortest (smallest Σϑ) matched path with geometric phase `target_beta`.
pub fn plan_shortest_path(
    target_beta: f64,
    eta1_grid: &[f64],
    eta2_grid: &[f64],
    constraints: &DesignConstraints,
) -> Result<Design> {
    if !(target_beta > 0.0 && target_beta < TAU) {
        return Err(Error::InvalidArgument(format!("target beta {target_beta} outside (0, 2pi)")));
    }
    if eta1_grid.is_empty() || eta2_grid.is_empty() {
        return Err(Error::InvalidArgument("empty eta grid".into()));
    }
    if let Some(eta) = eta1_grid.iter().chain(eta2_grid).find(|&&e| !(e > 0.0 && e < PI)) {
        return Err(Error::InvalidArgument(format!("grid value {eta} outside (0, pi)")));
    }
    if !(constraints.omega_max > 0.0) {
        return Err(Error::InvalidArgument("omega_max must be positive".into()));
    }

    let pairs: Vec<(f64, f64, Branch)> = eta1_grid
        .iter()
        .flat_map(|&e1| {
            eta2_grid
                .iter()
                .flat_map(move |&e2| [Branch::Principal, Branch::Complement].map(|b| (e1, e2, b)))
        })
        .collect();
    let mut candidates: Vec<Candidate> = pairs
        .par_iter()
        .filter_map(|&(e1, e2, b)| roots_for(target_beta, e1, e2, b, constraints))
        .collect();

    if constraints.allow_single_segment {
        for &eta in eta1_grid {
            let beta = wrap_angle(PI - PI * eta.cos());
            let fits = constraints.tau_max.is_none_or(|t| duration(PI, eta, constraints.omega_max) <= t);
            if fits && angle_difference(beta, target_beta).abs() < BETA_TOL {
                candidates.push(Candidate { total: PI, eta1: eta, eta2: None, theta1: PI, branch: None });
            }
        }
    }

    let best = candidates
        .into_iter()
        .min_by(|a, b| a.cmp(b))
        .ok_or_else(|| Error::NoSolution(format!("no matched path reaches beta = {target_beta}")))?;

    let plan = match best.eta2 {
        Some(eta2) => {
            build_matched_pair(
                constraints.frame,
                constraints.phi1,
                SegmentAngles::new(best.theta1, best.eta1),
                eta2,
                constraints.omega_max,
                constraints.omega_max,
                best.branch.expect("pair candidate has a branch"),
            )?
            .0
        }
        None => {
            let seg = SegmentSpec::from_angles(constraints.frame, PI, best.eta1, constraints.omega_max, constraints.phi1)?;
            PathPlan::new(constraints.frame, vec![seg])?
        }
    };

    let cyc = check_cyclic(&plan)?;
    let geo = check_geometric(&plan, DEFAULT_SAMPLES_PER_SEGMENT)?;
    if cyc > 1e-8 || geo > 1e-8 {
        return Err(Error::NoSolution(format!(
            "best candidate failed verification (cyclic {cyc:.2e}, geometric {geo:.2e})"
        )));
    }

    let beta = super::closed_form_beta(&plan).unwrap_or(target_beta);
    Ok(Design {
        plan,
        beta,
        total_angle: best.total,
        eta1: best.eta1,
        eta2: best.eta2,
        branch: best.branch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn pi_target_returns_resonant_pulse() {
        let d = plan_shortest_path(PI, &[FRAC_PI_2], &[FRAC_PI_2], &DesignConstraints::default()).unwrap();
        assert_eq!(d.plan.segments.len(), 1);
        assert!((d.total_angle - PI).abs() < 1e-12);
        assert!(d.plan.segments[0].delta.abs() < 1e-12);
    }

    #[test]
    fn worked_example_is_feasible_witness() {
        let eta1 = (4.0f64 / 3.0).atan();
        let d = plan_shortest_path(PI / 18.0, &[eta1], &[FRAC_PI_2], &DesignConstraints::default()).unwrap();
        assert!(d.total_angle <= 0.57711 * PI, "{}", d.total_angle / PI);
        assert!(angle_difference(d.beta, PI / 18.0).abs() < 1e-6);
    }

    #[test]
    fn input_validation() {
        let c = DesignConstraints::default();
        assert!(plan_shortest_path(1.0, &[], &[1.0], &c).is_err());
        assert!(plan_shortest_path(0.0, &[1.0], &[1.0], &c).is_err());
        assert!(plan_shortest_path(1.0, &[0.0], &[1.0], &c).is_err());
    }

    #[test]
    fn tight_duration_bound_has_no_solution() {
        let c = DesignConstraints { tau_max: Some(1e-3), ..Default::default() };
        assert!(matches!(
            plan_shortest_path(1.0, &[1.0], &[FRAC_PI_2], &c),
            Err(Error::NoSolution(_))
        ));
    }
}
