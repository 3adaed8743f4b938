//! Dormand-Prince 5(4) with proportional-integral step control.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{Field, IntegrateError, Result};
use crate::format::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorOptions {
    #[serde(default = "defaults::rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "defaults::abs_tol")]
    pub abs_tol: f64,
    /// Max-norm of the state at which integration stops with `BlownUp`.
    #[serde(default = "defaults::blowup_threshold")]
    pub blowup_threshold: f64,
    #[serde(default = "defaults::max_steps")]
    pub max_steps: usize,
    #[serde(default = "defaults::min_step")]
    pub min_step: f64,
    pub horizon: f64,
}

mod defaults {
    pub fn rel_tol() -> f64 {
        1e-9
    }
    pub fn abs_tol() -> f64 {
        1e-12
    }
    pub fn blowup_threshold() -> f64 {
        1e8
    }
    pub fn max_steps() -> usize {
        10_000_000
    }
    pub fn min_step() -> f64 {
        1e-14
    }
}

impl IntegratorOptions {
    pub fn with_horizon(horizon: f64) -> Self {
        Self {
            rel_tol: defaults::rel_tol(),
            abs_tol: defaults::abs_tol(),
            blowup_threshold: defaults::blowup_threshold(),
            max_steps: defaults::max_steps(),
            min_step: defaults::min_step(),
            horizon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(IntegrateError::InvalidOptions(msg));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad(format!("tolerances must be positive ({}, {})", self.rel_tol, self.abs_tol));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive and finite, got {}", self.horizon));
        }
        if !(self.min_step > 0.0 && self.min_step < self.horizon) {
            return bad(format!("need 0 < min_step < horizon, got {}", self.min_step));
        }
        if !(self.blowup_threshold > 0.0) {
            return bad(format!("blow-up threshold must be positive, got {}", self.blowup_threshold));
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    /// The state's max-norm crossed the threshold at `t_est`, in `component`.
    BlownUp { t_est: f64, component: usize },
    Survived { horizon: f64 },
    /// The controller asked for a step below `min_step` at `t_fail`.
    StepCollapse { t_fail: f64 },
}

/// Every accepted step of one integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Size of the step that produced each sample; zero for the initial one.
    pub steps: Vec<f64>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn dimension(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    /// CSV with columns `t, state0..stateN, step`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut header = String::from("t");
        for i in 0..self.dimension() {
            header.push_str(&format!(",state{i}"));
        }
        header.push_str(",step\n");
        w.write_all(header.as_bytes())?;
        for ((t, s), h) in self.times.iter().zip(&self.states).zip(&self.steps) {
            let mut line = fmt_f64(*t);
            for x in s {
                line.push(',');
                line.push_str(&fmt_f64(*x));
            }
            line.push(',');
            line.push_str(&fmt_f64(*h));
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

pub(crate) fn max_norm(y: &[f64]) -> (f64, usize) {
    y.iter()
        .enumerate()
        .fold((0.0, 0), |(m, k), (i, v)| if v.abs() > m { (v.abs(), i) } else { (m, k) })
}

// Dormand-Prince coefficients.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller constants.
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - 0.75 * BETA;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

struct Stages {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y_new: vec![0.0; n],
        }
    }
}

fn error_norm(y: &[f64], y_new: &[f64], err: &[f64], opts: &IntegratorOptions) -> f64 {
    let n = y.len() as f64;
    let sum: f64 = y
        .iter()
        .zip(y_new)
        .zip(err)
        .map(|((a, b), e)| {
            let sc = opts.abs_tol + opts.rel_tol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

fn initial_step(field: &Field, y0: &[f64], f0: &[f64], opts: &IntegratorOptions) -> f64 {
    let scale = |y: f64| opts.abs_tol + opts.rel_tol * y.abs();
    let n = y0.len() as f64;
    let d0 = (y0.iter().map(|y| (y / scale(*y)).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (f0.iter().zip(y0).map(|(f, y)| (f / scale(*y)).powi(2)).sum::<f64>() / n).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(opts.horizon);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let mut f1 = vec![0.0; y0.len()];
    field.eval(h0, &y1, &mut f1);
    let d2 = (f1
        .iter()
        .zip(f0)
        .zip(y0)
        .map(|((a, b), y)| ((a - b) / scale(*y)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    let h = (100.0 * h0).min(h1).min(opts.horizon);
    if h.is_finite() && h > 0.0 {
        h
    } else {
        1e-6f64.min(opts.horizon)
    }
}

/// Integrates `field` from `state0` at `t = 0` until blow-up, the horizon,
/// or step collapse. Every accepted step is retained.
pub fn integrate_ivp(field: &Field, state0: &[f64], opts: &IntegratorOptions) -> Result<Trajectory> {
    opts.validate()?;
    let n = field.dimension();
    if state0.len() != n {
        return Err(IntegrateError::DimensionMismatch { expected: n, found: state0.len() });
    }
    if state0.iter().any(|v| !v.is_finite()) {
        return Err(IntegrateError::NonFiniteState { t: 0.0 });
    }

    let mut t = 0.0;
    let mut y = state0.to_vec();
    let mut times = vec![0.0];
    let mut states = vec![y.clone()];
    let mut steps = vec![0.0];

    let (norm0, comp0) = max_norm(&y);
    if norm0 >= opts.blowup_threshold {
        return Ok(Trajectory {
            times,
            states,
            steps,
            termination: Termination::BlownUp { t_est: 0.0, component: comp0 },
        });
    }

    let mut st = Stages::new(n);
    field.eval(t, &y, &mut st.k[0]);
    if st.k[0].iter().any(|v| !v.is_finite()) {
        return Err(IntegrateError::NonFiniteState { t });
    }
    let mut h = initial_step(field, &y, &st.k[0].clone(), opts);
    let mut err_old: f64 = 1e-4;
    let mut rejected_last = false;
    let mut attempts = 0usize;

    loop {
        let remaining = opts.horizon - t;
        let clipped = h >= remaining;
        if clipped {
            h = remaining;
        } else if h < opts.min_step {
            return Ok(Trajectory {
                times,
                states,
                steps,
                termination: Termination::StepCollapse { t_fail: t },
            });
        }
        attempts += 1;
        if attempts > opts.max_steps {
            return Err(IntegrateError::MaxStepsExceeded { t, steps: attempts - 1 });
        }

        let err = dp_step(field, t, &y, h, &mut st, opts);
        if err <= 1.0 {
            let fac11 = err.powf(EXPO);
            let mut fac = fac11 / err_old.powf(BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if rejected_last {
                h_new = h_new.min(h);
            }
            err_old = err.max(1e-4);
            rejected_last = false;

            t = if clipped { opts.horizon } else { t + h };
            std::mem::swap(&mut y, &mut st.y_new);
            // FSAL: stage 7 is the derivative at the new point.
            st.k.swap(0, 6);
            times.push(t);
            states.push(y.clone());
            steps.push(h);

            let (norm, comp) = max_norm(&y);
            if norm >= opts.blowup_threshold {
                return Ok(Trajectory {
                    times,
                    states,
                    steps,
                    termination: Termination::BlownUp { t_est: t, component: comp },
                });
            }
            if clipped {
                return Ok(Trajectory {
                    times,
                    states,
                    steps,
                    termination: Termination::Survived { horizon: opts.horizon },
                });
            }
            h = h_new;
        } else {
            let shrink = if err.is_finite() {
                (err.powf(EXPO) / SAFETY).min(1.0 / FAC_MIN)
            } else {
                1.0 / FAC_MIN
            };
            h /= shrink;
            rejected_last = true;
        }
    }
}

/// One trial step; fills `st.y_new` and `st.k[6]` and returns the scaled
/// error norm (infinite when a stage is not finite).
fn dp_step(field: &Field, t: f64, y: &[f64], h: f64, st: &mut Stages, opts: &IntegratorOptions) -> f64 {
    let n = y.len();
    let Stages { k, tmp, y_new } = st;
    let (k1, rest) = k.split_first_mut().expect("seven stages");
    let [k2, k3, k4, k5, k6, k7] = rest else { unreachable!() };

    for i in 0..n {
        tmp[i] = y[i] + h * A21 * k1[i];
    }
    field.eval(t + C2 * h, tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    }
    field.eval(t + C3 * h, tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    }
    field.eval(t + C4 * h, tmp, k4);
    for i in 0..n {
        tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    }
    field.eval(t + C5 * h, tmp, k5);
    for i in 0..n {
        tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    }
    field.eval(t + h, tmp, k6);
    for i in 0..n {
        y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
    }
    field.eval(t + h, y_new, k7);
    for i in 0..n {
        tmp[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    if y_new.iter().chain(k7.iter()).any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let err = error_norm(y, y_new, tmp, opts);
    if err.is_nan() {
        f64::INFINITY
    } else {
        err
    }
}
