use serde::{Deserialize, Serialize};

use super::field::{extremal_scalar_field, extremal_system_field};
use super::{detect_blowup, IntegrateError, IntegratorOptions, Result, Termination, Trajectory};
use crate::odi::{
    boundary_f, boundary_f2, boundary_f2_slope, boundary_f_slope, boundary_fp_slope,
    Certificate, InitialData, ModelParams, OdiParams, RegionKind, SystemParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InwardnessReport {
    /// Smallest component of the field along the unit inward normal.
    pub min_inward: f64,
    pub argmin_x: f64,
    pub samples: usize,
    /// System samples where the a-priori velocity bound does not hold yet.
    pub skipped: usize,
}

/// Component of `(dx, dy)` along the unit normal pointing into `y > curve(x)`,
/// where the curve has slope `slope`.
fn inward(slope: f64, dx: f64, dy: f64) -> f64 {
    if slope.is_infinite() {
        -dx * slope.signum()
    } else {
        (dy - slope * dx) / (1.0 + slope * slope).sqrt()
    }
}

fn sample_points(n: usize, range: (f64, f64)) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if n < 2 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(IntegrateError::Precondition(format!(
            "need at least two samples over a finite range lo < hi, got {n} over [{lo}, {hi}]"
        )));
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

/// Samples the boundary of the region and reports the smallest inward
/// component of the equality-case field there.
///
/// At kinks both one-sided normals are tested. For the system region the
/// samples are corners `(s, f_q(s), s, f_p(s))` of the product set in
/// `(U, U', V, V')`, and only corners where `U'^(q-1) V'^(p-1) >= alpha^2 a^2`
/// (the bound that invariance relies on) are counted.
pub fn boundary_inwardness(
    kind: &RegionKind,
    params: &ModelParams,
    n_samples: usize,
    x_range: (f64, f64),
) -> Result<InwardnessReport> {
    let xs = sample_points(n_samples, x_range)?;
    let mut report =
        InwardnessReport { min_inward: f64::INFINITY, argmin_x: f64::NAN, samples: 0, skipped: 0 };
    let record = |x: f64, value: f64, r: &mut InwardnessReport| {
        r.samples += 1;
        if value < r.min_inward {
            r.min_inward = value;
            r.argmin_x = x;
        }
    };
    match (kind, params) {
        (RegionKind::SubQuadratic(consts), ModelParams::Scalar(p)) => {
            let field = extremal_scalar_field(p);
            for x in xs {
                let y = boundary_f(consts, p, x);
                let d = field.derivative(0.0, &[x, y]);
                let (left, right) = boundary_f_slope(consts, p, x);
                let value = inward(left, d[0], d[1]).min(inward(right, d[0], d[1]));
                record(x, value, &mut report);
            }
        }
        (RegionKind::SuperQuadratic { epsilon, a_shift }, ModelParams::Scalar(p)) => {
            let field = extremal_scalar_field(p);
            for x in xs {
                let y = boundary_f2(p, *epsilon, *a_shift, x)?;
                let slope = boundary_f2_slope(p, *epsilon, *a_shift, x)?;
                let d = field.derivative(0.0, &[x, y]);
                record(x, inward(slope, d[0], d[1]), &mut report);
            }
        }
        (RegionKind::System(sp), _) => {
            let field = extremal_system_field(sp);
            let scale = sp.alpha_sys() * sp.a();
            let bound = scale * scale;
            for s in xs {
                let (u, vp) = (s, sp.boundary_p(s));
                let (v, up) = (s, sp.boundary_q(s));
                if up.powf(sp.q() - 1.0) * vp.powf(sp.p() - 1.0) < bound {
                    report.skipped += 1;
                    continue;
                }
                let d = field.derivative(0.0, &[u, up, v, vp]);
                // face V' = f_p(U): motion (U', V'') in the (U, V') plane
                let face_p = inward(boundary_fp_slope(scale, sp.p(), u), d[0], d[3]);
                // face U' = f_q(V): motion (V', U'') in the (V, U') plane
                let face_q = inward(boundary_fp_slope(scale, sp.q(), v), d[2], d[1]);
                record(s, face_p.min(face_q), &mut report);
            }
        }
        (RegionKind::Levine { .. }, _) => {
            return Err(IntegrateError::Precondition(
                "inwardness is not defined for the comparison wedge".into(),
            ))
        }
        _ => {
            return Err(IntegrateError::Precondition(
                "region kind does not match the parameter variant".into(),
            ))
        }
    }
    Ok(report)
}

fn scalar_params(cert: &Certificate) -> Result<OdiParams> {
    cert.scalar_params()
        .copied()
        .ok_or_else(|| IntegrateError::Precondition("expected a scalar certificate".into()))
}

fn system_params(cert: &Certificate) -> Result<SystemParams> {
    cert.system_params()
        .copied()
        .ok_or_else(|| IntegrateError::Precondition("expected a system certificate".into()))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn check_initial(traj: &Trajectory, cert: &Certificate) -> Result<()> {
    let first = traj
        .states
        .first()
        .ok_or_else(|| IntegrateError::Precondition("empty trajectory".into()))?;
    let matches = match (cert.initial, first.len()) {
        (InitialData::Scalar { v0, v1 }, 2) => close(first[0], v0) && close(first[1], v1),
        (InitialData::System { u0, v0, u1, v1 }, 4) => {
            close(first[0], u0) && close(first[1], u1) && close(first[2], v0) && close(first[3], v1)
        }
        _ => false,
    };
    if matches {
        Ok(())
    } else {
        Err(IntegrateError::Precondition(format!(
            "trajectory does not start from the certified data {:?}",
            cert.initial
        )))
    }
}

/// Index of the first sample that lies outside the certified region, if any.
///
/// Sub-quadratic: `y > F(x)`. Super-quadratic: `y > F2(x)` after the initial
/// point, which lies on `F2` by construction. System: `V' >= f_p(U)` and
/// `U' >= f_q(V)`.
pub fn first_region_exit(traj: &Trajectory, cert: &Certificate) -> Result<Option<usize>> {
    check_initial(traj, cert)?;
    let outside = |i: usize, s: &[f64]| -> Result<bool> {
        Ok(match &cert.region {
            RegionKind::SubQuadratic(consts) => {
                let p = scalar_params(cert)?;
                !(s[1] > 0.0 && s[1] > boundary_f(consts, &p, s[0]))
            }
            RegionKind::SuperQuadratic { epsilon, a_shift } => {
                let p = scalar_params(cert)?;
                if i == 0 {
                    false
                } else {
                    match boundary_f2(&p, *epsilon, *a_shift, s[0]) {
                        Ok(y) => !(s[1] > y),
                        Err(_) => true,
                    }
                }
            }
            RegionKind::System(sp) => !(s[3] >= sp.boundary_p(s[0]) && s[1] >= sp.boundary_q(s[2])),
            RegionKind::Levine { .. } => {
                return Err(IntegrateError::Precondition(
                    "region invariance is not checked for the comparison wedge".into(),
                ))
            }
        })
    };
    for (i, s) in traj.states.iter().enumerate() {
        if outside(i, s)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvelopeViolation {
    Below { t: f64, value: f64, envelope: f64 },
    LateBlowup { t_blowup: f64, bound: f64 },
    NoBlowup,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub passed: bool,
    /// Minimum of `value / envelope - 1` over the checked samples.
    pub worst_margin: f64,
    pub worst_time: f64,
    pub checked: usize,
    /// Refined blow-up time when the tail fit succeeds, else the termination time.
    pub t_blowup: Option<f64>,
    pub t_star: f64,
    pub violation: Option<EnvelopeViolation>,
}

/// Checks the derivative (`v'` for scalar certificates, `U' + V'` for system
/// ones) against `(1 - slack)` times the rate envelope at every accepted step
/// before blow-up, and that blow-up happened by `(1 + slack) t_star`.
pub fn check_envelope(
    traj: &Trajectory,
    cert: &Certificate,
    slack: f64,
    opts: &IntegratorOptions,
) -> Result<EnvelopeReport> {
    if !(0.0..=0.1).contains(&slack) {
        return Err(IntegrateError::Precondition(format!("slack must lie in [0, 0.1], got {slack}")));
    }
    check_initial(traj, cert)?;
    let is_system = match cert.initial {
        InitialData::Scalar { .. } => {
            scalar_params(cert)?;
            false
        }
        InitialData::System { .. } => {
            system_params(cert)?;
            true
        }
    };
    let growth = |s: &[f64]| if is_system { s[1] + s[3] } else { s[1] };

    let t_blowup = match traj.termination {
        Termination::Survived { .. } => None,
        Termination::BlownUp { t_est, .. } => {
            Some(detect_blowup(traj, opts, None).map(|e| e.t_est).unwrap_or(t_est))
        }
        Termination::StepCollapse { t_fail } => {
            Some(detect_blowup(traj, opts, None).map(|e| e.t_est).unwrap_or(t_fail))
        }
    };
    let cutoff = t_blowup.unwrap_or(f64::INFINITY).min(cert.t_star);

    let mut report = EnvelopeReport {
        passed: true,
        worst_margin: f64::INFINITY,
        worst_time: f64::NAN,
        checked: 0,
        t_blowup,
        t_star: cert.t_star,
        violation: None,
    };
    for (t, s) in traj.times.iter().zip(&traj.states) {
        if *t >= cutoff {
            break;
        }
        let Some(env) = cert.envelope.value(*t) else { break };
        let value = growth(s);
        let margin = value / env - 1.0;
        report.checked += 1;
        if margin < report.worst_margin {
            report.worst_margin = margin;
            report.worst_time = *t;
        }
        if report.violation.is_none() && value < (1.0 - slack) * env {
            report.passed = false;
            report.violation = Some(EnvelopeViolation::Below { t: *t, value, envelope: env });
        }
    }
    if report.violation.is_none() {
        match t_blowup {
            None => {
                report.passed = false;
                report.violation = Some(EnvelopeViolation::NoBlowup);
            }
            Some(tb) if tb > (1.0 + slack) * cert.t_star => {
                report.passed = false;
                report.violation =
                    Some(EnvelopeViolation::LateBlowup { t_blowup: tb, bound: (1.0 + slack) * cert.t_star });
            }
            Some(_) => {}
        }
    }
    Ok(report)
}
