use thiserror::Error;

use crate::holonomy::HolonomyReport;

/// Errors produced by the design, verification and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate segment: both Rabi amplitudes are zero")]
    DegenerateSegment,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("matching condition violated: {0}")]
    MatchViolation(String),
    #[error("evolution is not cyclic (residual {:.3e})", .0.cyclic_residual)]
    NotCyclic(Box<HolonomyReport>),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("integration step {dt} exceeds the stability bound {max}")]
    StepTooLarge { dt: f64, max: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
