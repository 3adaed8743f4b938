//! Tail fit of `y ~ c (T - t)^(-k)` to the last accepted steps before blow-up.

use serde::{Deserialize, Serialize};

use super::{max_norm, IntegrateError, IntegratorOptions, Result, Termination, Trajectory};

/// Minimum number of accepted steps above the tail level.
pub const TAIL_POINTS: usize = 8;

/// Tail level as a fraction of the blow-up threshold.
const TAIL_LEVEL: f64 = 0.01;

const EXPONENT_RANGE: (f64, f64) = (0.05, 20.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupEstimate {
    pub t_est: f64,
    pub exponent_est: f64,
    /// RMS misfit of the tail samples, in time units.
    pub residual: f64,
    pub tail_points: usize,
    pub component: usize,
}

struct LinearFit {
    slope: f64,
    intercept: f64,
    rms: f64,
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    LinearFit { slope, intercept, rms: (ss / n).sqrt() }
}

/// `y^(-1/k)` rescaled to a maximum of one.
fn reciprocal_power(ys: &[f64], k: f64) -> Vec<f64> {
    let logs: Vec<f64> = ys.iter().map(|y| -y.ln() / k).collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    logs.iter().map(|l| (l - top).exp()).collect()
}

/// Misfit of the linear model for exponent `k`, relative to the spread of the data.
fn relative_misfit(ts: &[f64], ys: &[f64], k: f64) -> f64 {
    let g = reciprocal_power(ys, k);
    let spread = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - g.iter().cloned().fold(f64::INFINITY, f64::min);
    let fit = linear_fit(ts, &g);
    if spread > 0.0 && fit.rms.is_finite() {
        fit.rms / spread
    } else {
        f64::INFINITY
    }
}

fn best_exponent(ts: &[f64], ys: &[f64]) -> f64 {
    let (lo, hi) = (EXPONENT_RANGE.0.ln(), EXPONENT_RANGE.1.ln());
    let n_grid = 400;
    let grid: Vec<f64> = (0..=n_grid).map(|i| lo + (hi - lo) * i as f64 / n_grid as f64).collect();
    let scores: Vec<f64> = grid.iter().map(|l| relative_misfit(ts, ys, l.exp())).collect();
    let best = scores
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(n_grid)];
    // golden-section refinement inside the bracketing cells
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let f = |l: f64| relative_misfit(ts, ys, l.exp());
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    (0.5 * (a + b)).exp()
}

/// Refines the blow-up time from the tail of a trajectory that ended by
/// threshold crossing or step collapse.
///
/// With `exponent_hint = Some(k)` the exponent is fixed (for the scalar
/// equality field, `k = 1/(q-1)`); otherwise it is fitted over
/// `[0.05, 20]`. In both cases `y^(-1/k)` is fitted linearly in `t` and its
/// zero is the blow-up time.
pub fn detect_blowup(
    traj: &Trajectory,
    opts: &IntegratorOptions,
    exponent_hint: Option<f64>,
) -> Result<BlowupEstimate> {
    let component = match traj.termination {
        Termination::BlownUp { component, .. } => component,
        Termination::StepCollapse { .. } => max_norm(traj.last_state()).1,
        Termination::Survived { .. } => {
            return Err(IntegrateError::Precondition(
                "trajectory survived to the horizon; nothing to refine".into(),
            ))
        }
    };
    if let Some(k) = exponent_hint {
        if !(k > 0.0 && k.is_finite()) {
            return Err(IntegrateError::Precondition(format!("exponent hint must be positive, got {k}")));
        }
    }
    let level = TAIL_LEVEL * opts.blowup_threshold;
    let start = traj
        .states
        .iter()
        .rposition(|s| s[component].abs() < level)
        .map_or(0, |i| i + 1);
    let tail = start..traj.len();
    if tail.len() < TAIL_POINTS {
        return Err(IntegrateError::InsufficientTail { found: tail.len(), needed: TAIL_POINTS });
    }
    let t_ref = *traj.times.last().expect("non-empty trajectory");
    let ts: Vec<f64> = traj.times[tail.clone()].iter().map(|t| t - t_ref).collect();
    let ys: Vec<f64> = traj.states[tail].iter().map(|s| s[component].abs()).collect();

    let k = exponent_hint.unwrap_or_else(|| best_exponent(&ts, &ys));
    let g = reciprocal_power(&ys, k);
    let fit = linear_fit(&ts, &g);
    if !(fit.slope < 0.0) {
        return Err(IntegrateError::Precondition(
            "tail is not growing like a reciprocal power".into(),
        ));
    }
    Ok(BlowupEstimate {
        t_est: t_ref - fit.intercept / fit.slope,
        exponent_est: k,
        residual: fit.rms / fit.slope.abs(),
        tail_points: ts.len(),
        component,
    })
}
