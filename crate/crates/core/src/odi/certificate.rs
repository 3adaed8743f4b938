use serde::{Deserialize, Serialize};

use super::scalar::{
    epsilon_min, epsilon_polynomial, in_region_sub_quadratic, sub_quadratic_constants,
    SubQuadraticConstants,
};
use super::{OdiError, OdiParams, Result, SystemParams};

/// Which admissible region the initial data was placed in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionKind {
    SubQuadratic(SubQuadraticConstants),
    /// `a_shift` is `A = eps b v1^q - a v0`, positive on the admissible set.
    SuperQuadratic { epsilon: f64, a_shift: f64 },
    System(SystemParams),
    Levine { s0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Scalar,
    Wave,
    Elliptic,
    Parabolic,
    System,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    Scalar { v0: f64, v1: f64 },
    System { u0: f64, v0: f64, u1: f64, v1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Scalar(OdiParams),
    System(SystemParams),
}

/// Lower bound `(base - slope t)^(1/(1-power))` on the growing derivative.
///
/// `anchor` is the value at `t = 0` (`v1`, or `U1 + V1` for systems) and
/// `base = anchor^(1-power)`. Evaluation goes through `anchor` so the envelope
/// reproduces the initial derivative exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub base: f64,
    pub slope: f64,
    pub power: f64,
    pub anchor: f64,
}

impl Envelope {
    fn new(anchor: f64, slope: f64, power: f64) -> Self {
        Self { base: anchor.powf(1.0 - power), slope, power, anchor }
    }

    pub fn pole(&self) -> f64 {
        self.base / self.slope
    }

    /// Envelope value; `None` at or beyond the pole.
    pub fn value(&self, t: f64) -> Option<f64> {
        let remaining = 1.0 - t / self.pole();
        if remaining > 0.0 {
            Some(self.anchor * remaining.powf(1.0 / (1.0 - self.power)))
        } else {
            None
        }
    }
}

/// Verdict of a successful blow-up test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub provenance: Provenance,
    pub params: ModelParams,
    pub initial: InitialData,
    pub region: RegionKind,
    /// `1/2` for `q <= 2`, the smallest admissible root for `q > 2`, absent for systems.
    pub epsilon: Option<f64>,
    pub t_star: f64,
    pub envelope: Envelope,
    /// `1 / sup(phi)`, present when the certificate comes from a PDE projection.
    pub l1_factor: Option<f64>,
}

impl Certificate {
    pub fn scalar_params(&self) -> Option<&OdiParams> {
        match &self.params {
            ModelParams::Scalar(p) => Some(p),
            ModelParams::System(_) => None,
        }
    }

    pub fn system_params(&self) -> Option<&SystemParams> {
        match &self.params {
            ModelParams::System(p) => Some(p),
            ModelParams::Scalar(_) => None,
        }
    }

    pub(crate) fn system(
        sp: SystemParams,
        initial: InitialData,
        anchor: f64,
        slope: f64,
        l1_factor: Option<f64>,
    ) -> Self {
        let envelope = Envelope::new(anchor, slope, sp.p());
        Certificate {
            provenance: Provenance::System,
            params: ModelParams::System(sp),
            initial,
            region: RegionKind::System(sp),
            epsilon: None,
            t_star: envelope.pole(),
            envelope,
            l1_factor,
        }
    }
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(OdiError::InvalidParameter(format!("{name} must be finite, got {x}")))
    }
}

fn check_phi_sup(phi_sup: f64) -> Result<f64> {
    if phi_sup > 0.0 && phi_sup.is_finite() {
        Ok(1.0 / phi_sup)
    } else {
        Err(OdiError::InvalidParameter(format!("sup of phi must be positive, got {phi_sup}")))
    }
}

/// Blow-up certificate for `v'' + a v >= b v'^q` with `v(0) = v0`, `v'(0) = v1`.
pub fn certify_scalar(params: &OdiParams, v0: f64, v1: f64) -> Result<Certificate> {
    check_finite("v0", v0)?;
    check_finite("v1", v1)?;
    let (a, b, q) = (params.a(), params.b(), params.q());
    let (epsilon, region) = if params.is_sub_quadratic() {
        let consts = sub_quadratic_constants(params)?;
        if !in_region_sub_quadratic(params, v0, v1)? {
            return Err(OdiError::NotCertified(format!(
                "(v0, v1) = ({v0}, {v1}) is not above the sub-quadratic boundary"
            )));
        }
        (0.5, RegionKind::SubQuadratic(consts))
    } else {
        if !(v1 > 0.0) {
            return Err(OdiError::NotCertified(format!("v1 = {v1} is not positive")));
        }
        let f1 = epsilon_polynomial(params, v0, v1, 1.0);
        if !(f1 > 0.0) {
            return Err(OdiError::NotCertified(format!(
                "super-quadratic condition fails: f(1) = {f1} <= 0"
            )));
        }
        let eps = epsilon_min(params, v0, v1)?;
        let a_shift = eps * b * v1.powf(q) - a * v0;
        (eps, RegionKind::SuperQuadratic { epsilon: eps, a_shift })
    };
    let envelope = Envelope::new(v1, (q - 1.0) * (1.0 - epsilon) * b, q);
    Ok(Certificate {
        provenance: Provenance::Scalar,
        params: ModelParams::Scalar(*params),
        initial: InitialData::Scalar { v0, v1 },
        region,
        epsilon: Some(epsilon),
        t_star: envelope.pole(),
        envelope,
        l1_factor: None,
    })
}

/// Lower bound on the derivative at time `t`, valid on `[0, t_star)`.
pub fn rate_envelope(cert: &Certificate, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(OdiError::InvalidParameter(format!("t must be non-negative, got {t}")));
    }
    cert.envelope.value(t).ok_or(OdiError::BeyondPole { t, t_star: cert.t_star })
}

/// Wave inequality `u'' + L u >= g(u')`, `g(s) >= C|s|^q`, projected onto the
/// eigenfunction with eigenvalue `lambda`. `v0, v1` are the projections of the
/// initial data and `phi_sup` is the sup norm of the unit-mass eigenfunction.
pub fn certify_wave(
    lambda: f64,
    growth: f64,
    q: f64,
    v0: f64,
    v1: f64,
    phi_sup: f64,
) -> Result<Certificate> {
    let l1 = check_phi_sup(phi_sup)?;
    let params = OdiParams::new(lambda, growth, q)?;
    let mut cert = certify_scalar(&params, v0, v1)?;
    cert.provenance = Provenance::Wave;
    cert.l1_factor = Some(l1);
    Ok(cert)
}

/// Hyperbolic-elliptic system `u_tt - Δu >= |v_t|^q`, `-Δv = u`. Projection gives
/// `λ V' = U'`, so `U'' + λU >= λ^(-q) |U'|^q`.
pub fn reduce_elliptic(lambda: f64, q: f64, u0: f64, u1: f64, phi_sup: f64) -> Result<Certificate> {
    let l1 = check_phi_sup(phi_sup)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(OdiError::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let params = OdiParams::new(lambda, lambda.powf(-q), q)?;
    let mut cert = certify_scalar(&params, u0, u1)?;
    cert.provenance = Provenance::Elliptic;
    cert.l1_factor = Some(l1);
    Ok(cert)
}

/// Parameters of the hyperbolic-parabolic system
/// `u_tt - Δu >= |v_t|^q`, `(u-v)_t - Δ(u-v)^m <= β (u-v)^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParabolicHypothesis {
    pub lambda: f64,
    pub q: f64,
    pub beta: f64,
    pub m: f64,
    pub p: f64,
}

/// Checks `β <= 0` or `[β <= λ and U0 - V0 >= 1]`, together with
/// `U0 - V0 >= 0`, then certifies `U'' + λU >= U'^q`.
///
/// A violated hypothesis is [`OdiError::HypothesisViolated`]; a failed region
/// test is [`OdiError::NotCertified`].
pub fn reduce_parabolic(
    h: &ParabolicHypothesis,
    u0: f64,
    v0: f64,
    u1: f64,
    phi_sup: f64,
) -> Result<Certificate> {
    let l1 = check_phi_sup(phi_sup)?;
    for (name, x) in [("beta", h.beta), ("m", h.m), ("p", h.p), ("U0", u0), ("V0", v0)] {
        check_finite(name, x)?;
    }
    if !(h.m >= 1.0 && 1.0 >= h.p) {
        return Err(OdiError::InvalidParameter(format!(
            "need m >= 1 >= p, got m = {}, p = {}",
            h.m, h.p
        )));
    }
    let params = OdiParams::new(h.lambda, 1.0, h.q)?;
    let gap = u0 - v0;
    if !(gap >= 0.0) {
        return Err(OdiError::HypothesisViolated(format!("U0 - V0 = {gap} is negative")));
    }
    if !(h.beta <= 0.0 || (h.beta <= h.lambda && gap >= 1.0)) {
        return Err(OdiError::HypothesisViolated(format!(
            "need beta <= 0 or [beta <= lambda and U0 - V0 >= 1]; got beta = {}, lambda = {}, U0 - V0 = {gap}",
            h.beta, h.lambda
        )));
    }
    let mut cert = certify_scalar(&params, u0, u1)?;
    cert.provenance = Provenance::Parabolic;
    cert.l1_factor = Some(l1);
    Ok(cert)
}
