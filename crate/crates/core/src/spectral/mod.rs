//! Sine-Galerkin truncation of wave problems on `(0, pi)` with Dirichlet
//! conditions, `L = -d^2/dx^2`, first eigenpair `lambda = 1`,
//! `phi = sin(x) / 2` (unit mass, `sup phi = 1/2`).
//!
//! Only the equality case `g(s) = C|s|^q` is simulated. The nonlinearity is
//! evaluated by collocation on a composite Gauss-Legendre rule with at least
//! four nodes per mode, and every run records the projected quantities the
//! blow-up certificates talk about.

mod problem;
mod quadrature;
mod simulate;

pub use problem::{
    build_wave_problem, project_eigen, project_function, ModalPair, ModalState, ProblemKind,
    SpectralConfig, WaveInitial, WaveProblem, PHI_SUP,
};
pub use quadrature::{gauss_legendre, Quadrature, PANEL_POINTS};
pub use simulate::{
    simulate_wave, verify_theorem, Snapshot, TheoremCheck, TheoremReport, TheoremViolation,
    WaveTrajectory, RESIDUAL_TOL, TAIL_LIMIT,
};

use thiserror::Error;

use crate::integrate::IntegrateError;
use crate::odi::OdiError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("invalid spectral config: {0}")]
    InvalidConfig(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Odi(#[from] OdiError),
}

pub type Result<T> = std::result::Result<T, SpectralError>;
