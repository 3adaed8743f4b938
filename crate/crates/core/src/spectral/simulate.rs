use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::problem::{ModalState, ProblemKind, WaveProblem};
use super::{Result, SpectralError};
use crate::format::{fmt_f64, FixedFormatter};
use crate::integrate::{integrate_ivp, IntegratorOptions, Termination};
use crate::odi::{Certificate, InitialData, ModelParams};

/// Spectral tail ratio above which the truncation is no longer trusted.
pub const TAIL_LIMIT: f64 = 1e-3;

/// Quantities recorded at every accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    /// `U = int u phi` and `U'`.
    pub v: f64,
    pub v_prime: f64,
    /// `(V, V')` for coupled problems; for the elliptic variant `V'` is
    /// computed by quadrature of the reconstructed `v_t`.
    pub second: Option<(f64, f64)>,
    /// `|u_t|_{L^1}`, or `|u_t + v_t|_{L^1}` for the wave system.
    pub l1_norm: f64,
    /// `int |w|^r phi - |int w phi|^r` for the forcing term(s); the minimum
    /// over both equations for the wave system.
    pub jensen_residual: f64,
    /// Size of the terms in the Jensen residual, for relative tolerances.
    pub jensen_scale: f64,
    /// Residual of the projected inequality the certificate uses:
    /// `U'' + U - C|U'|^q` (wave system: minimum over both equations).
    pub odi_residual: f64,
    pub odi_scale: f64,
    /// Largest `|coef_k| / max_j |coef_j|` over the two highest modes.
    pub tail_ratio: f64,
}

impl Snapshot {
    /// `U'`, or `U' + V'` for the wave system.
    pub fn growth(&self, system: bool) -> f64 {
        match (system, self.second) {
            (true, Some((_, vp))) => self.v_prime + vp,
            _ => self.v_prime,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveTrajectory {
    pub kind: ProblemKind,
    pub growth: f64,
    pub q: f64,
    pub snapshots: Vec<Snapshot>,
    pub modal: Vec<ModalState>,
    pub termination: Termination,
    /// Time of the first snapshot whose tail ratio exceeds [`TAIL_LIMIT`].
    pub resolution_loss: Option<f64>,
    /// Last snapshot time before resolution loss (the final time otherwise).
    pub last_trusted_time: f64,
}

impl WaveTrajectory {
    pub fn is_system(&self) -> bool {
        matches!(self.kind, ProblemKind::WaveSystem { .. })
    }

    /// Earliest of threshold crossing, step collapse and resolution loss.
    pub fn indicator_time(&self) -> Option<f64> {
        let end = match self.termination {
            Termination::BlownUp { t_est, .. } => Some(t_est),
            Termination::StepCollapse { t_fail } => Some(t_fail),
            Termination::Survived { .. } => None,
        };
        match (end, self.resolution_loss) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// CSV `t,v,v_prime,l1_norm,jensen_residual,tail_ratio`, plus
    /// `v2,v2_prime` for coupled problems.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let coupled = self.snapshots.first().is_some_and(|s| s.second.is_some());
        let mut header = String::from("t,v,v_prime,l1_norm,jensen_residual,tail_ratio");
        if coupled {
            header.push_str(",v2,v2_prime");
        }
        header.push('\n');
        w.write_all(header.as_bytes())?;
        for s in &self.snapshots {
            let mut cols = vec![s.t, s.v, s.v_prime, s.l1_norm, s.jensen_residual, s.tail_ratio];
            if let Some((a, b)) = s.second {
                cols.extend([a, b]);
            }
            let line: Vec<String> = cols.into_iter().map(fmt_f64).collect();
            w.write_all(line.join(",").as_bytes())?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Per-snapshot modal coefficients as JSON.
    pub fn write_modal_json<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut ser = serde_json::Serializer::with_formatter(&mut w, FixedFormatter::default());
        self.modal.serialize(&mut ser).map_err(io::Error::other)?;
        w.write_all(b"\n")
    }
}

fn tail_ratio(c: &[f64]) -> f64 {
    let n = c.len();
    let top = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if top == 0.0 || n < 2 {
        return 0.0;
    }
    // two modes so that data with a parity symmetry (odd modes only) is seen
    let first_tail = n.saturating_sub(2).max(1);
    c[first_tail..].iter().fold(0.0f64, |m, x| m.max(x.abs())) / top
}

struct Recorder<'a> {
    problem: &'a WaveProblem,
    ut: Vec<f64>,
    vt: Vec<f64>,
    scratch: Vec<f64>,
}

impl Recorder<'_> {
    /// `(int |w|^r phi - |int w phi|^r, int |w|^r phi)` for nodal `w`.
    fn jensen(&mut self, nodal_is_v: bool, r: f64) -> (f64, f64) {
        let quad = self.problem.quadrature();
        let w = if nodal_is_v { &self.vt } else { &self.ut };
        for (s, x) in self.scratch.iter_mut().zip(w) {
            *s = x.abs().powf(r);
        }
        let lhs = quad.against_phi(&self.scratch);
        let mean = quad.against_phi(w);
        (lhs - mean.abs().powf(r), lhs)
    }

    fn snapshot(&mut self, t: f64, y: &[f64]) -> (Snapshot, ModalState) {
        let pr = self.problem;
        let cfg = &pr.config;
        let n = cfg.n_modes;
        let (c, q) = (cfg.growth, cfg.q);
        let dy = pr.field().derivative(t, y);
        let state = pr.modal_state(t, y, &dy);
        let quad = pr.quadrature();
        let (u, up) = state.u.project();
        let upp = std::f64::consts::PI / 4.0 * dy[n];
        quad.synthesize(&state.u.velocity, &mut self.ut);
        if let Some(v) = &state.v {
            quad.synthesize(&v.velocity, &mut self.vt);
        }
        let mut tail = tail_ratio(&y[..n]).max(tail_ratio(&y[n..2 * n]));
        let odi_u = |rhs: f64| (upp + u - rhs, upp.abs() + u.abs() + rhs.abs());

        let (second, l1_norm, (jensen_residual, jensen_scale), (odi_residual, odi_scale)) =
            match cfg.problem {
                ProblemKind::SingleWave => {
                    let l1 = quad.integrate(&self.ut.iter().map(|x| x.abs()).collect::<Vec<_>>());
                    (None, l1, self.jensen(false, q), odi_u(c * up.abs().powf(q)))
                }
                ProblemKind::WaveSystem { p } => {
                    let v = state.v.as_ref().expect("system state has v");
                    let (vv, vp) = v.project();
                    let vpp = std::f64::consts::PI / 4.0 * dy[3 * n];
                    tail = tail.max(tail_ratio(&v.position)).max(tail_ratio(&v.velocity));
                    let sum: Vec<f64> = self.ut.iter().zip(&self.vt).map(|(a, b)| (a + b).abs()).collect();
                    let ju = self.jensen(true, p);
                    let jv = self.jensen(false, q);
                    let ou = odi_u(c * vp.abs().powf(p));
                    let rhs_v = c * up.abs().powf(q);
                    let ov = (vpp + vv - rhs_v, vpp.abs() + vv.abs() + rhs_v.abs());
                    let jensen = if ju.0 <= jv.0 { ju } else { jv };
                    let odi = if ou.0 <= ov.0 { ou } else { ov };
                    (Some((vv, vp)), quad.integrate(&sum), jensen, odi)
                }
                ProblemKind::HyperbolicElliptic | ProblemKind::HyperbolicParabolic { .. } => {
                    let v = state.v.as_ref().expect("coupled state has v");
                    let vp = quad.against_phi(&self.vt);
                    let vv = v.project_quadrature(quad).0;
                    if let ProblemKind::HyperbolicParabolic { .. } = cfg.problem {
                        tail = tail.max(tail_ratio(&y[2 * n..]));
                    }
                    let l1 = quad.integrate(&self.ut.iter().map(|x| x.abs()).collect::<Vec<_>>());
                    (Some((vv, vp)), l1, self.jensen(true, q), odi_u(c * up.abs().powf(q)))
                }
            };
        let snap = Snapshot {
            t,
            v: u,
            v_prime: up,
            second,
            l1_norm,
            jensen_residual,
            jensen_scale,
            odi_residual,
            odi_scale,
            tail_ratio: tail,
        };
        (snap, state)
    }
}

/// Integrates the modal field and records a [`Snapshot`] at every accepted
/// step. The integrator's horizon is taken from the problem config.
pub fn simulate_wave(problem: &WaveProblem, opts: &IntegratorOptions) -> Result<WaveTrajectory> {
    let opts = IntegratorOptions { horizon: problem.config.horizon, ..*opts };
    let traj = integrate_ivp(problem.field(), problem.initial_state(), &opts)?;
    let m = problem.quadrature().len();
    let mut rec = Recorder { problem, ut: vec![0.0; m], vt: vec![0.0; m], scratch: vec![0.0; m] };
    let mut snapshots = Vec::with_capacity(traj.len());
    let mut modal = Vec::with_capacity(traj.len());
    for (t, y) in traj.times.iter().zip(&traj.states) {
        let (s, st) = rec.snapshot(*t, y);
        snapshots.push(s);
        modal.push(st);
    }
    let lost = snapshots.iter().position(|s| s.tail_ratio > TAIL_LIMIT);
    let resolution_loss = lost.map(|i| snapshots[i].t);
    let last_trusted_time = match lost {
        Some(0) => 0.0,
        Some(i) => snapshots[i - 1].t,
        None => snapshots.last().map_or(0.0, |s| s.t),
    };
    Ok(WaveTrajectory {
        kind: problem.config.problem,
        growth: problem.config.growth,
        q: problem.config.q,
        snapshots,
        modal,
        termination: traj.termination,
        resolution_loss,
        last_trusted_time,
    })
}

/// Which part of the theorem a snapshot violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremCheck {
    /// (i) projected derivative below the rate envelope.
    Derivative,
    /// (ii) `L^1` norm of the velocity below `l1_factor` times the envelope.
    L1Norm,
    /// (iii) projected inequality residual negative beyond tolerance.
    OdiResidual,
    /// Blow-up indicator after `(1 + slack) t_star`.
    LateIndicator,
    /// Survived a horizon beyond `t_star` with no indicator.
    NoIndicator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremViolation {
    pub check: TheoremCheck,
    pub snapshot: Option<usize>,
    pub t: f64,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub passed: bool,
    pub checked: usize,
    pub t_star: f64,
    pub last_trusted_time: f64,
    pub indicator_time: Option<f64>,
    /// Minimum of `value / envelope - 1` for check (i).
    pub worst_margin: f64,
    /// Smallest Jensen residual over all snapshots, relative to its scale.
    pub min_jensen: f64,
    pub violation: Option<TheoremViolation>,
}

/// Relative tolerance for the residual checks.
pub const RESIDUAL_TOL: f64 = 1e-8;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0)
}

fn check_matches(wt: &WaveTrajectory, cert: &Certificate) -> Result<()> {
    let mismatch = |what: &str| Err(SpectralError::Precondition(format!("certificate {what} mismatch")));
    let unit = wt.growth == 1.0;
    let params_ok = match (&wt.kind, &cert.params) {
        (ProblemKind::SingleWave, ModelParams::Scalar(p)) => {
            p.a() == 1.0 && p.b() == wt.growth && p.q() == wt.q
        }
        (ProblemKind::WaveSystem { p }, ModelParams::System(sp)) => {
            unit && sp.a() == 1.0 && sp.p() == *p && sp.q() == wt.q
        }
        (ProblemKind::HyperbolicElliptic | ProblemKind::HyperbolicParabolic { .. }, ModelParams::Scalar(p)) => {
            unit && p.a() == 1.0 && p.b() == 1.0 && p.q() == wt.q
        }
        _ => false,
    };
    if !params_ok {
        return mismatch("(lambda, C, q)");
    }
    let Some(first) = wt.snapshots.first() else {
        return Err(SpectralError::Precondition("empty trajectory".into()));
    };
    let data_ok = match cert.initial {
        InitialData::Scalar { v0, v1 } => close(first.v, v0) && close(first.v_prime, v1),
        InitialData::System { u0, v0, u1, v1 } => first.second.is_some_and(|(vv, vp)| {
            close(first.v, u0) && close(first.v_prime, u1) && close(vv, v0) && close(vp, v1)
        }),
    };
    if !data_ok {
        return mismatch("initial data");
    }
    if cert.l1_factor.is_none() {
        return mismatch("L1 factor");
    }
    Ok(())
}

/// Checks a simulated run against a certificate at every trusted snapshot
/// before `t_star`:
/// (i) `U' >= (1 - slack) envelope` (`U' + V'` for the wave system),
/// (ii) `|u_t|_{L^1} >= (1 - slack) l1_factor envelope`,
/// (iii) projected inequality residual `>= -RESIDUAL_TOL * scale`,
/// and that the blow-up indicator comes no later than `(1 + slack) t_star`.
pub fn verify_theorem(wt: &WaveTrajectory, cert: &Certificate, slack: f64) -> Result<TheoremReport> {
    if !(0.0..=0.1).contains(&slack) {
        return Err(SpectralError::Precondition(format!("slack must lie in [0, 0.1], got {slack}")));
    }
    check_matches(wt, cert)?;
    let l1_factor = cert.l1_factor.unwrap_or(1.0);
    let system = wt.is_system();
    let mut report = TheoremReport {
        passed: true,
        checked: 0,
        t_star: cert.t_star,
        last_trusted_time: wt.last_trusted_time,
        indicator_time: wt.indicator_time(),
        worst_margin: f64::INFINITY,
        min_jensen: f64::INFINITY,
        violation: None,
    };
    let fail = |r: &mut TheoremReport, v: TheoremViolation| {
        if r.violation.is_none() {
            r.passed = false;
            r.violation = Some(v);
        }
    };
    report.min_jensen = wt
        .snapshots
        .iter()
        .map(|s| s.jensen_residual / s.jensen_scale.max(1.0))
        .fold(f64::INFINITY, f64::min);
    for (i, s) in wt.snapshots.iter().enumerate() {
        if s.t > wt.last_trusted_time {
            break;
        }
        let Some(env) = cert.envelope.value(s.t) else { break };
        report.checked += 1;
        let g = s.growth(system);
        report.worst_margin = report.worst_margin.min(g / env - 1.0);
        let at = |check, value, bound| TheoremViolation { check, snapshot: Some(i), t: s.t, value, bound };
        if g < (1.0 - slack) * env {
            fail(&mut report, at(TheoremCheck::Derivative, g, (1.0 - slack) * env));
        }
        let l1_bound = (1.0 - slack) * l1_factor * env;
        if s.l1_norm < l1_bound {
            fail(&mut report, at(TheoremCheck::L1Norm, s.l1_norm, l1_bound));
        }
        let tol = -RESIDUAL_TOL * s.odi_scale.max(1.0);
        if s.odi_residual < tol {
            fail(&mut report, at(TheoremCheck::OdiResidual, s.odi_residual, tol));
        }
    }
    let late_bound = (1.0 + slack) * cert.t_star;
    match report.indicator_time {
        Some(t) if t > late_bound => fail(
            &mut report,
            TheoremViolation { check: TheoremCheck::LateIndicator, snapshot: None, t, value: t, bound: late_bound },
        ),
        None => {
            if let Termination::Survived { horizon } = wt.termination {
                if horizon > late_bound {
                    fail(
                        &mut report,
                        TheoremViolation {
                            check: TheoremCheck::NoIndicator,
                            snapshot: None,
                            t: horizon,
                            value: horizon,
                            bound: late_bound,
                        },
                    );
                }
            }
        }
        _ => {}
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_ratio_cases() {
        assert_eq!(tail_ratio(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(tail_ratio(&[1.0]), 0.0);
        assert_eq!(tail_ratio(&[2.0, 0.0, 0.0, 0.5]), 0.25);
        // odd-only data still shows its tail through mode N - 1
        assert_eq!(tail_ratio(&[1.0, 0.0, 0.1, 0.0]), 0.1);
    }
}
