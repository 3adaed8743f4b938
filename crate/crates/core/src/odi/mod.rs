//! Closed-form blow-up criteria for the scalar inequality
//! `v'' + a v >= b v'^q`, the coupled system
//! `U'' + aU >= V'^p, V'' + aV >= U'^q`, and the PDE problems that reduce to them
//! by projection onto a positive first eigenfunction.
//!
//! Every function here is pure. A failed region test is reported as
//! [`OdiError::NotCertified`]: the criteria are sufficient conditions, so a
//! failure says nothing about global existence.

mod certificate;
mod levine;
mod scalar;
mod system;

pub use certificate::{
    certify_scalar, certify_wave, rate_envelope, reduce_elliptic, reduce_parabolic,
    Certificate, Envelope, InitialData, ModelParams, ParabolicHypothesis, Provenance, RegionKind,
};
pub use levine::{levine_region, levine_threshold};
pub use scalar::{
    admissible_boundary_super_quadratic, boundary_f, boundary_f2, boundary_f2_slope,
    boundary_f_slope, epsilon_min, epsilon_polynomial, in_region_sub_quadratic,
    in_region_super_quadratic, sub_quadratic_constants, SubQuadraticConstants,
};
pub use system::{boundary_fp, boundary_fp_slope, certify_system, in_region_system, SystemData};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdiError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("q = {q} is outside the {branch} branch")]
    WrongBranch { q: f64, branch: &'static str },
    #[error("super-quadratic admissibility condition violated: f(1) = {f1} <= 0")]
    ConditionViolated { f1: f64 },
    #[error("F2 evaluated outside its domain: a*x + A = {value} <= 0")]
    Domain { value: f64 },
    #[error("t = {t} is at or beyond the envelope pole t* = {t_star}")]
    BeyondPole { t: f64, t_star: f64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("not certified (inconclusive): {0}")]
    NotCertified(String),
}

pub type Result<T> = std::result::Result<T, OdiError>;

/// Coefficients of `v'' + a v >= b v'^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOdiParams")]
pub struct OdiParams {
    a: f64,
    b: f64,
    q: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOdiParams {
    a: f64,
    b: f64,
    q: f64,
}

impl TryFrom<RawOdiParams> for OdiParams {
    type Error = OdiError;
    fn try_from(raw: RawOdiParams) -> Result<Self> {
        OdiParams::new(raw.a, raw.b, raw.q)
    }
}

impl OdiParams {
    pub fn new(a: f64, b: f64, q: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(OdiError::InvalidParameter(format!("a must be positive, got {a}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(OdiError::InvalidParameter(format!("b must be positive, got {b}")));
        }
        if !(q > 1.0 && q.is_finite()) {
            return Err(OdiError::InvalidParameter(format!("q must exceed 1, got {q}")));
        }
        Ok(Self { a, b, q })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `q <= 2` selects the sub-quadratic construction (inclusive at 2).
    pub fn is_sub_quadratic(&self) -> bool {
        self.q <= 2.0
    }
}

/// Parameters of the coupled inequality system with the derived constants
/// `alpha = 1 + 1/(ap)` and `beta = 1/(1 + ap)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystemParams")]
pub struct SystemParams {
    a: f64,
    p: f64,
    q: f64,
    #[serde(skip_deserializing)]
    alpha_sys: f64,
    #[serde(skip_deserializing)]
    beta_sys: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystemParams {
    a: f64,
    p: f64,
    q: f64,
    // Accepted so that a serialized SystemParams can be read back.
    #[serde(default)]
    #[allow(dead_code)]
    alpha_sys: Option<f64>,
    #[serde(default)]
    #[allow(dead_code)]
    beta_sys: Option<f64>,
}

impl TryFrom<RawSystemParams> for SystemParams {
    type Error = OdiError;
    fn try_from(raw: RawSystemParams) -> Result<Self> {
        SystemParams::new(raw.a, raw.p, raw.q)
    }
}

impl SystemParams {
    pub fn new(a: f64, p: f64, q: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(OdiError::InvalidParameter(format!("a must be positive, got {a}")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(OdiError::InvalidParameter(format!("p must exceed 1, got {p}")));
        }
        if !(q >= p && q.is_finite()) {
            return Err(OdiError::InvalidParameter(format!(
                "q must satisfy q >= p = {p}, got {q}"
            )));
        }
        let ap = a * p;
        Ok(Self { a, p, q, alpha_sys: 1.0 + 1.0 / ap, beta_sys: 1.0 / (1.0 + ap) })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha_sys(&self) -> f64 {
        self.alpha_sys
    }

    pub fn beta_sys(&self) -> f64 {
        self.beta_sys
    }

    /// Same exponents with `a` replaced, e.g. by an eigenvalue.
    pub fn with_a(&self, a: f64) -> Result<Self> {
        Self::new(a, self.p, self.q)
    }
}
