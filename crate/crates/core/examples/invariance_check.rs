//! Integrate the equality case from certified points and confirm the orbit
//! never leaves the region before it blows up.
//!
//! Run with `cargo run --example invariance_check`.

use blowup::integrate::{extremal_scalar_field, first_region_exit, integrate_ivp, IntegratorOptions};
use blowup::odi::{certify_scalar, OdiParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (a, b, q, v0, v1) in [(1.0, 2.0, 1.5, -1.0, 0.2), (1.0, 2.0, 1.5, 2.0, 2.0), (2.0, 1.0, 3.0, 0.5, 3.0)] {
        let params = OdiParams::new(a, b, q)?;
        let cert = certify_scalar(&params, v0, v1)?;
        let opts = IntegratorOptions::with_horizon(2.0 * cert.t_star);
        let traj = integrate_ivp(&extremal_scalar_field(&params), &[v0, v1], &opts)?;
        let exit = first_region_exit(&traj, &cert)?;
        println!(
            "a={a} b={b} q={q} ({v0}, {v1}): {} steps, {:?}, exit = {exit:?}",
            traj.len(),
            traj.termination
        );
    }
    Ok(())
}
