//! Adaptive integration of the equality-case fields, blow-up time
//! estimation, and numerical checks of the certificates (region invariance,
//! boundary inwardness, envelope domination).

mod blowup;
mod checks;
mod field;
mod rk;

pub use blowup::{detect_blowup, BlowupEstimate, TAIL_POINTS};
pub use checks::{
    boundary_inwardness, check_envelope, first_region_exit, EnvelopeReport, EnvelopeViolation,
    InwardnessReport,
};
pub use field::{extremal_scalar_field, extremal_system_field, Field};
pub use rk::{integrate_ivp, IntegratorOptions, Termination, Trajectory};

pub(crate) use rk::max_norm;

use thiserror::Error;

use crate::odi::OdiError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("invalid integrator options: {0}")]
    InvalidOptions(String),
    #[error("state dimension {found} does not match field dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("exceeded {steps} step attempts at t = {t}")]
    MaxStepsExceeded { t: f64, steps: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("insufficient tail data: {found} accepted steps above the tail level, need {needed}")]
    InsufficientTail { found: usize, needed: usize },
    #[error(transparent)]
    Odi(#[from] OdiError),
}

pub type Result<T> = std::result::Result<T, IntegrateError>;
