//! JSON run configurations for `simulate`. Unknown keys are rejected and the
//! echoed config has every default filled in.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::integrate::IntegratorOptions;
use crate::odi::{OdiParams, SystemData, SystemParams};
use crate::spectral::{SpectralConfig, WaveInitial};

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_wave_slack() -> f64 {
    0.05
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarInitial {
    pub v0: f64,
    pub v1: f64,
}

/// `simulate odi`: the equality case of `v'' + a v >= b v'^q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdiRunConfig {
    pub params: OdiParams,
    pub initial: ScalarInitial,
    pub integrator: IntegratorOptions,
    /// Relative slack for the envelope check, in `[0, 0.1]`.
    #[serde(default)]
    pub slack: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Reserved for samplers; simulations are deterministic.
    #[serde(default)]
    pub seed: u64,
}

/// `simulate system`: the equality case of the coupled inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemRunConfig {
    pub params: SystemParams,
    pub initial: SystemData,
    pub integrator: IntegratorOptions,
    #[serde(default)]
    pub slack: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

/// Integrator settings for spectral runs; the horizon comes from the
/// spectral config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "tol::rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "tol::abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "tol::blowup_threshold")]
    pub blowup_threshold: f64,
    #[serde(default = "tol::max_steps")]
    pub max_steps: usize,
    #[serde(default = "tol::min_step")]
    pub min_step: f64,
}

mod tol {
    use crate::integrate::IntegratorOptions;

    fn base() -> IntegratorOptions {
        IntegratorOptions::with_horizon(1.0)
    }
    pub fn rel_tol() -> f64 {
        base().rel_tol
    }
    pub fn abs_tol() -> f64 {
        base().abs_tol
    }
    pub fn blowup_threshold() -> f64 {
        base().blowup_threshold
    }
    pub fn max_steps() -> usize {
        base().max_steps
    }
    pub fn min_step() -> f64 {
        base().min_step
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        let o = IntegratorOptions::with_horizon(1.0);
        Self {
            rel_tol: o.rel_tol,
            abs_tol: o.abs_tol,
            blowup_threshold: o.blowup_threshold,
            max_steps: o.max_steps,
            min_step: o.min_step,
        }
    }
}

impl Tolerances {
    pub fn with_horizon(&self, horizon: f64) -> IntegratorOptions {
        IntegratorOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            blowup_threshold: self.blowup_threshold,
            max_steps: self.max_steps,
            min_step: self.min_step,
            horizon,
        }
    }
}

/// `simulate wave | elliptic | parabolic`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveRunConfig {
    pub spectral: SpectralConfig,
    pub initial: WaveInitial,
    #[serde(default)]
    pub integrator: Tolerances,
    #[serde(default = "default_wave_slack")]
    pub slack: f64,
    /// Also write the per-snapshot modal coefficients.
    #[serde(default)]
    pub dump_modal: bool,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}
