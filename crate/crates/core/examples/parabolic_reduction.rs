//! Hyperbolic-parabolic system: the hypothesis on `beta` and the gap
//! `U0 - V0`, then a simulation whose gap decays while `U'` blows up.
//!
//! Run with `cargo run --release --example parabolic_reduction`.

use blowup::integrate::IntegratorOptions;
use blowup::odi::{reduce_parabolic, ParabolicHypothesis};
use blowup::spectral::{build_wave_problem, simulate_wave, ProblemKind, SpectralConfig, WaveInitial, PHI_SUP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = ParabolicHypothesis { lambda: 1.0, q: 1.5, beta: 0.5, m: 1.0, p: 1.0 };
    for (u0, v0) in [(2.0, 0.5), (1.0, 0.5)] {
        match reduce_parabolic(&h, u0, v0, 4.0, PHI_SUP) {
            Ok(c) => println!("beta = 0.5, gap {}: t* = {:.4}", u0 - v0, c.t_star),
            Err(e) => println!("beta = 0.5, gap {}: {e}", u0 - v0),
        }
    }
    let config = SpectralConfig {
        n_modes: 32,
        n_quad: 128,
        growth: 1.0,
        q: 1.5,
        problem: ProblemKind::HyperbolicParabolic { beta: -1.0, p: 1.0, m: 1.0 },
        horizon: 3.0,
    };
    let init = WaveInitial { u0: vec![0.0], u1: vec![4.0], v0: Some(vec![-1.0]), v1: None };
    let problem = build_wave_problem(config, init)?;
    let cert = problem.certify()?;
    let wt = simulate_wave(&problem, &IntegratorOptions::with_horizon(1.0))?;
    for s in wt.snapshots.iter().step_by((wt.snapshots.len() / 8).max(1)) {
        let gap = s.v - s.second.map_or(0.0, |(v, _)| v);
        println!("t = {:.4}: U' = {:.4e}, gap = {gap:.4e}", s.t, s.v_prime);
    }
    println!("indicator {:?} vs t* {:.4}", wt.indicator_time(), cert.t_star);
    Ok(())
}
