use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::quadrature::{Quadrature, PANEL_POINTS};
use super::{Result, SpectralError};
use crate::integrate::Field;
use crate::odi::{
    certify_system, certify_wave, reduce_elliptic, reduce_parabolic, Certificate,
    ParabolicHypothesis, SystemData, SystemParams,
};

/// `sup phi` for `phi = sin(x) / 2`.
pub const PHI_SUP: f64 = 0.5;

/// Which PDE is truncated. The growth constant `C` and exponent `q` live in
/// [`SpectralConfig`]; variants carry only what is specific to them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemKind {
    /// `u_tt - u_xx = C |u_t|^q`.
    SingleWave,
    /// `u_tt - u_xx = C |v_t|^p`, `v_tt - v_xx = C |u_t|^q`.
    WaveSystem { p: f64 },
    /// `u_tt - u_xx = C |v_t|^q` with `-v_xx = u`.
    HyperbolicElliptic,
    /// `u_tt - u_xx = C |v_t|^q` with the gap `w = u - v` solving
    /// `w_t - w_xx = beta (w_+)^p`. Only `m = 1` is simulated.
    HyperbolicParabolic {
        beta: f64,
        p: f64,
        #[serde(default = "unit_m")]
        m: f64,
    },
}

fn unit_m() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralConfig {
    pub n_modes: usize,
    /// Lower bound on the number of quadrature nodes; at least `4 n_modes`.
    pub n_quad: usize,
    #[serde(rename = "C")]
    pub growth: f64,
    pub q: f64,
    pub problem: ProblemKind,
    pub horizon: f64,
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SpectralError::InvalidConfig(msg));
        if self.n_modes == 0 {
            return bad("n_modes must be positive".into());
        }
        if self.n_quad < 4 * self.n_modes {
            return bad(format!(
                "n_quad = {} is below 4 n_modes = {}",
                self.n_quad,
                4 * self.n_modes
            ));
        }
        if !(self.growth >= 0.0 && self.growth.is_finite()) {
            return bad(format!("C must be non-negative and finite, got {}", self.growth));
        }
        if !(self.q > 1.0 && self.q.is_finite()) {
            return bad(format!("q must exceed 1, got {}", self.q));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive and finite, got {}", self.horizon));
        }
        match self.problem {
            ProblemKind::SingleWave | ProblemKind::HyperbolicElliptic => {}
            ProblemKind::WaveSystem { p } => {
                if !(p > 1.0 && p.is_finite()) {
                    return bad(format!("p must exceed 1, got {p}"));
                }
            }
            ProblemKind::HyperbolicParabolic { beta, p, m } => {
                if m != 1.0 {
                    return bad(format!("only m = 1 is simulated, got m = {m}"));
                }
                if !(p > 0.0 && p <= 1.0) {
                    return bad(format!("the gap reaction needs 0 < p <= 1, got {p}"));
                }
                if !beta.is_finite() {
                    return bad(format!("beta must be finite, got {beta}"));
                }
            }
        }
        Ok(())
    }

    /// Panels of the composite rule: `max(N, ceil(n_quad / 8))`.
    pub fn panels(&self) -> usize {
        self.n_modes.max(self.n_quad.div_ceil(PANEL_POINTS))
    }

    pub fn is_coupled(&self) -> bool {
        !matches!(self.problem, ProblemKind::SingleWave)
    }
}

/// Sine coefficients of the initial data. Missing entries are zero.
///
/// `v0, v1` are the second unknown of the wave system; the parabolic variant
/// takes `v0` only (its `v_t` follows from the gap equation), and the
/// elliptic variant takes neither.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveInitial {
    #[serde(default)]
    pub u0: Vec<f64>,
    #[serde(default)]
    pub u1: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v1: Option<Vec<f64>>,
}

impl WaveInitial {
    /// Mode-one data `u0 sin x`, `u1 sin x`.
    pub fn mode_one(u0: f64, u1: f64) -> Self {
        Self { u0: vec![u0], u1: vec![u1], v0: None, v1: None }
    }
}

/// Sine coefficients of a function sampled at the nodes of `quad`.
pub fn project_function(quad: &Quadrature, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let values: Vec<f64> = quad.nodes.iter().map(|&x| f(x)).collect();
    let mut out = vec![0.0; quad.n_modes()];
    quad.analyze(&values, &mut out);
    out
}

/// Position and velocity coefficients of one unknown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalPair {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
}

impl ModalPair {
    /// `(int u phi, int u_t phi)` in closed form: only mode one contributes,
    /// with weight `pi / 4`.
    pub fn project(&self) -> (f64, f64) {
        let first = |c: &[f64]| c.first().map_or(0.0, |c1| PI / 4.0 * c1);
        (first(&self.position), first(&self.velocity))
    }

    /// The same projection by quadrature of the synthesized functions.
    pub fn project_quadrature(&self, quad: &Quadrature) -> (f64, f64) {
        let mut buf = vec![0.0; quad.len()];
        quad.synthesize(&self.position, &mut buf);
        let v = quad.against_phi(&buf);
        quad.synthesize(&self.velocity, &mut buf);
        (v, quad.against_phi(&buf))
    }
}

/// Galerkin state at one time. `v` is present for coupled problems; for the
/// elliptic and parabolic variants it is derived from the evolved unknowns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalState {
    pub time: f64,
    pub u: ModalPair,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<ModalPair>,
}

/// `(v, v')` of the first unknown, `v = int u phi`.
pub fn project_eigen(state: &ModalState) -> (f64, f64) {
    state.u.project()
}

/// A truncated problem ready for integration.
#[derive(Debug, Clone)]
pub struct WaveProblem {
    pub config: SpectralConfig,
    pub initial: WaveInitial,
    quad: Arc<Quadrature>,
    state0: Vec<f64>,
    field: Field,
}

fn padded(name: &str, c: &[f64], n: usize) -> Result<Vec<f64>> {
    if c.len() > n {
        return Err(SpectralError::InvalidConfig(format!(
            "{name} has {} coefficients but n_modes = {n}",
            c.len()
        )));
    }
    if let Some(x) = c.iter().find(|x| !x.is_finite()) {
        return Err(SpectralError::InvalidConfig(format!("{name} has a non-finite coefficient {x}")));
    }
    let mut out = c.to_vec();
    out.resize(n, 0.0);
    Ok(out)
}

/// `C (2/pi) int |s|^r sin(kx)` for nodal `s`, into `out`.
fn power_forcing(quad: &Quadrature, nodal: &[f64], r: f64, c: f64, scratch: &mut [f64], out: &mut [f64]) {
    for (o, s) in scratch.iter_mut().zip(nodal) {
        *o = s.abs().powf(r);
    }
    quad.analyze(scratch, out);
    out.iter_mut().for_each(|x| *x *= c);
}

fn k2(k: usize) -> f64 {
    let k = (k + 1) as f64;
    k * k
}

/// Builds the first-order modal field `c_k' = d_k`,
/// `d_k' = -k^2 c_k + (2/pi) int F sin(kx)` for the configured forcing `F`.
///
/// State layout: `[c, d]` for the single wave and the elliptic variant,
/// `[c_u, d_u, c_v, d_v]` for the system, `[c, d, e]` with `e` the gap
/// `u - v` for the parabolic variant.
pub fn build_wave_problem(config: SpectralConfig, initial: WaveInitial) -> Result<WaveProblem> {
    config.validate()?;
    let n = config.n_modes;
    let quad = Arc::new(Quadrature::new(config.panels(), n));
    let u0 = padded("u0", &initial.u0, n)?;
    let u1 = padded("u1", &initial.u1, n)?;
    let (c, q) = (config.growth, config.q);
    let m = quad.len();

    let (state0, field) = match config.problem {
        ProblemKind::SingleWave => {
            reject_second(&initial, "single wave", true, true)?;
            let qd = quad.clone();
            let field = Field::new(2 * n, format!("sine-Galerkin u_tt - u_xx = {c}|u_t|^{q}"), move |_, y, dy| {
                let (pos, vel) = y.split_at(n);
                let (dpos, dvel) = dy.split_at_mut(n);
                dpos.copy_from_slice(vel);
                let (mut ut, mut scratch) = (vec![0.0; m], vec![0.0; m]);
                qd.synthesize(vel, &mut ut);
                power_forcing(&qd, &ut, q, c, &mut scratch, dvel);
                for (k, d) in dvel.iter_mut().enumerate() {
                    *d -= k2(k) * pos[k];
                }
            });
            ([u0, u1].concat(), field)
        }
        ProblemKind::WaveSystem { p } => {
            let v0 = padded("v0", initial.v0.as_deref().unwrap_or(&[]), n)?;
            let v1 = padded("v1", initial.v1.as_deref().unwrap_or(&[]), n)?;
            let qd = quad.clone();
            let label = format!("sine-Galerkin u_tt - u_xx = {c}|v_t|^{p}, v_tt - v_xx = {c}|u_t|^{q}");
            let field = Field::new(4 * n, label, move |_, y, dy| {
                let (cu, rest) = y.split_at(n);
                let (du, rest) = rest.split_at(n);
                let (cv, dv) = rest.split_at(n);
                let (dcu, rest) = dy.split_at_mut(n);
                let (ddu, rest) = rest.split_at_mut(n);
                let (dcv, ddv) = rest.split_at_mut(n);
                dcu.copy_from_slice(du);
                dcv.copy_from_slice(dv);
                let (mut ut, mut vt, mut scratch) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
                qd.synthesize(du, &mut ut);
                qd.synthesize(dv, &mut vt);
                power_forcing(&qd, &vt, p, c, &mut scratch, ddu);
                power_forcing(&qd, &ut, q, c, &mut scratch, ddv);
                for k in 0..n {
                    ddu[k] -= k2(k) * cu[k];
                    ddv[k] -= k2(k) * cv[k];
                }
            });
            ([u0, u1, v0, v1].concat(), field)
        }
        ProblemKind::HyperbolicElliptic => {
            reject_second(&initial, "hyperbolic-elliptic", true, true)?;
            let qd = quad.clone();
            let label = format!("sine-Galerkin u_tt - u_xx = {c}|v_t|^{q}, -v_xx = u");
            let field = Field::new(2 * n, label, move |_, y, dy| {
                let (pos, vel) = y.split_at(n);
                let (dpos, dvel) = dy.split_at_mut(n);
                dpos.copy_from_slice(vel);
                let vt_coeffs: Vec<f64> = vel.iter().enumerate().map(|(k, d)| d / k2(k)).collect();
                let (mut vt, mut scratch) = (vec![0.0; m], vec![0.0; m]);
                qd.synthesize(&vt_coeffs, &mut vt);
                power_forcing(&qd, &vt, q, c, &mut scratch, dvel);
                for (k, d) in dvel.iter_mut().enumerate() {
                    *d -= k2(k) * pos[k];
                }
            });
            ([u0, u1].concat(), field)
        }
        ProblemKind::HyperbolicParabolic { beta, p, .. } => {
            reject_second(&initial, "hyperbolic-parabolic", false, true)?;
            let v0 = padded("v0", initial.v0.as_deref().unwrap_or(&[]), n)?;
            let gap: Vec<f64> = u0.iter().zip(&v0).map(|(u, v)| u - v).collect();
            let mut nodal = vec![0.0; m];
            quad.synthesize(&gap, &mut nodal);
            let scale = gap.iter().fold(0.0f64, |s, x| s.max(x.abs()));
            if let Some((x, w)) = quad.nodes.iter().zip(&nodal).find(|(_, w)| **w < -1e-12 * scale) {
                return Err(SpectralError::InvalidConfig(format!(
                    "initial gap u0 - v0 = {w} < 0 at x = {x}"
                )));
            }
            let qd = quad.clone();
            let label = format!("sine-Galerkin u_tt - u_xx = {c}|v_t|^{q}, w_t - w_xx = {beta}(w_+)^{p}");
            let field = Field::new(3 * n, label, move |_, y, dy| {
                let (pos, rest) = y.split_at(n);
                let (vel, gap) = rest.split_at(n);
                let (dpos, rest) = dy.split_at_mut(n);
                let (dvel, dgap) = rest.split_at_mut(n);
                dpos.copy_from_slice(vel);
                gap_rate(&qd, gap, beta, p, dgap);
                let vt_coeffs: Vec<f64> = vel.iter().zip(dgap.iter()).map(|(d, e)| d - e).collect();
                let (mut vt, mut scratch) = (vec![0.0; m], vec![0.0; m]);
                qd.synthesize(&vt_coeffs, &mut vt);
                power_forcing(&qd, &vt, q, c, &mut scratch, dvel);
                for (k, d) in dvel.iter_mut().enumerate() {
                    *d -= k2(k) * pos[k];
                }
            });
            ([u0, u1, gap].concat(), field)
        }
    };
    Ok(WaveProblem { config, initial, quad, state0, field })
}

/// `e_k' = -k^2 e_k + beta (2/pi) int (w_+)^p sin(kx)`.
fn gap_rate(quad: &Quadrature, gap: &[f64], beta: f64, p: f64, out: &mut [f64]) {
    let m = quad.len();
    let (mut w, mut scratch) = (vec![0.0; m], vec![0.0; m]);
    quad.synthesize(gap, &mut w);
    for x in w.iter_mut() {
        *x = x.max(0.0);
    }
    power_forcing(quad, &w, p, beta, &mut scratch, out);
    for (k, e) in out.iter_mut().enumerate() {
        *e -= k2(k) * gap[k];
    }
}

fn reject_second(initial: &WaveInitial, name: &str, no_v0: bool, no_v1: bool) -> Result<()> {
    if no_v0 && initial.v0.is_some() {
        return Err(SpectralError::InvalidConfig(format!("the {name} problem takes no v0")));
    }
    if no_v1 && initial.v1.is_some() {
        return Err(SpectralError::InvalidConfig(format!("the {name} problem takes no v1")));
    }
    Ok(())
}

impl WaveProblem {
    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.state0
    }

    /// Unpacks an integrator state. `dy` must be the field at `(t, y)` for
    /// the parabolic variant, whose `v_t` involves the gap rate.
    pub fn modal_state(&self, t: f64, y: &[f64], dy: &[f64]) -> ModalState {
        let n = self.config.n_modes;
        let pair = |c: &[f64], d: &[f64]| ModalPair { position: c.to_vec(), velocity: d.to_vec() };
        let u = pair(&y[..n], &y[n..2 * n]);
        let v = match self.config.problem {
            ProblemKind::SingleWave => None,
            ProblemKind::WaveSystem { .. } => Some(pair(&y[2 * n..3 * n], &y[3 * n..])),
            ProblemKind::HyperbolicElliptic => {
                let div = |c: &[f64]| c.iter().enumerate().map(|(k, x)| x / k2(k)).collect();
                Some(ModalPair { position: div(&y[..n]), velocity: div(&y[n..2 * n]) })
            }
            ProblemKind::HyperbolicParabolic { .. } => {
                let position = y[..n].iter().zip(&y[2 * n..]).map(|(u, w)| u - w).collect();
                let velocity = y[n..2 * n].iter().zip(&dy[2 * n..]).map(|(u, w)| u - w).collect();
                Some(ModalPair { position, velocity })
            }
        };
        ModalState { time: t, u, v }
    }

    /// Projected initial data `(U0, U1)` and, for the wave system and the
    /// parabolic variant, `(V0, V1)`.
    pub fn projected_initial(&self) -> ModalState {
        let dy = self.field.derivative(0.0, &self.state0);
        self.modal_state(0.0, &self.state0, &dy)
    }

    /// Certificate for the projected problem (`lambda = 1`, `sup phi = 1/2`).
    ///
    /// The wave system, elliptic and parabolic reductions assume unit growth
    /// constant; other values of `C` are rejected here.
    pub fn certify(&self) -> Result<Certificate> {
        let st = self.projected_initial();
        let (u0, u1) = st.u.project();
        let (c, q) = (self.config.growth, self.config.q);
        let unit_growth = || {
            if c == 1.0 {
                Ok(())
            } else {
                Err(SpectralError::Precondition(format!(
                    "the coupled reductions assume C = 1, got C = {c}"
                )))
            }
        };
        let cert = match self.config.problem {
            ProblemKind::SingleWave => certify_wave(1.0, c, q, u0, u1, PHI_SUP)?,
            ProblemKind::WaveSystem { p } => {
                unit_growth()?;
                let (v0, v1) = st.v.as_ref().map_or((0.0, 0.0), ModalPair::project);
                let sp = SystemParams::new(1.0, p, q)?;
                certify_system(&sp, &SystemData { u0, v0, u1, v1 }, Some(PHI_SUP))?
            }
            ProblemKind::HyperbolicElliptic => {
                unit_growth()?;
                reduce_elliptic(1.0, q, u0, u1, PHI_SUP)?
            }
            ProblemKind::HyperbolicParabolic { beta, p, m } => {
                unit_growth()?;
                let (v0, _) = st.v.as_ref().map_or((0.0, 0.0), ModalPair::project);
                let h = ParabolicHypothesis { lambda: 1.0, q, beta, m, p };
                reduce_parabolic(&h, u0, v0, u1, PHI_SUP)?
            }
        };
        Ok(cert)
    }
}
